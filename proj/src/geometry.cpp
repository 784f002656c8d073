#include "greenlab/geometry.hpp"

namespace greenlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Spec: return "spec";
    case ErrorKind::Data: return "data";
    case ErrorKind::Extraction: return "extraction";
    case ErrorKind::DegenerateSource: return "degenerate-source";
    case ErrorKind::Contraction: return "contraction";
  }
  return "unknown";
}

void orthonormal_complement(const Point3& e, Point3& e1, Point3& e2) {
  const Point3 trial = std::abs(e.x()) < 0.9 ? Point3::UnitX() : Point3::UnitY();
  e1 = (trial - trial.dot(e) * e).normalized();
  e2 = e.cross(e1);
}

std::vector<Point3> cube_directions() {
  std::vector<Point3> out;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k)
        if (i != 0 || j != 0 || k != 0) out.push_back(Point3(i, j, k).normalized());
  return out;
}

std::vector<Point3> fibonacci_directions(int n) {
  require(n > 0, ErrorKind::Parameter, "fibonacci_directions: n must be positive");
  const double golden = pi * (3.0 - std::sqrt(5.0));
  std::vector<Point3> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(1.0 - z * z);
    const double phi = golden * i;
    out.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return out;
}

}  // namespace greenlab
