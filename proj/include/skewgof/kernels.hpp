#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace skewgof {

// Weight kernel Psi applied to squared distances.  Each choice corresponds to
// integrating the squared ECF difference against a spherical density: gaussian
// uses the standard normal, stable_index(b) a spherical stable law with index
// b in (0,2), gen_laplace(b) a generalized-Laplace-type weight with b > 0.
struct KernelSpec {
  enum class Kind { gaussian, stable_index, gen_laplace };

  Kind kind = Kind::gaussian;
  double b = 0.0;  // index for stable_index / gen_laplace, unused for gaussian

  static KernelSpec gaussian() { return {Kind::gaussian, 0.0}; }
  static KernelSpec stable_index(double b) {
    if (!(b > 0.0 && b < 2.0))
      throw std::invalid_argument("kernel stable:<b> requires b in (0,2)");
    return {Kind::stable_index, b};
  }
  static KernelSpec gen_laplace(double b) {
    if (!(b > 0.0)) throw std::invalid_argument("kernel genlaplace:<b> requires b > 0");
    return {Kind::gen_laplace, b};
  }

  // accepted forms: "gaussian", "stable:<b>", "genlaplace:<b>"
  static KernelSpec parse(const std::string& text) {
    auto colon = text.find(':');
    std::string name = text.substr(0, colon);
    auto number = [&]() {
      if (colon == std::string::npos || colon + 1 >= text.size())
        throw std::invalid_argument("kernel '" + name + "' needs a parameter, e.g. " + name + ":0.5");
      char* end = nullptr;
      double v = std::strtod(text.c_str() + colon + 1, &end);
      if (end != text.c_str() + text.size())
        throw std::invalid_argument("kernel parameter in '" + text + "' is not a number");
      return v;
    };
    if (name == "gaussian") {
      if (colon != std::string::npos)
        throw std::invalid_argument("gaussian kernel takes no parameter");
      return gaussian();
    }
    if (name == "stable") return stable_index(number());
    if (name == "genlaplace") return gen_laplace(number());
    throw std::invalid_argument("unknown kernel '" + text +
                                "' (expected gaussian | stable:<b> | genlaplace:<b>)");
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::gaussian: return "gaussian";
      case Kind::stable_index: return "stable:" + format_b();
      case Kind::gen_laplace: return "genlaplace:" + format_b();
    }
    return "?";
  }

 private:
  std::string format_b() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", b);
    return buf;
  }
};

// Psi(xi) for xi = squared distance >= 0.  All three kernels map [0,inf) into
// (0,1] with Psi(0) = 1 and are monotone decreasing.
inline double kernel_eval(const KernelSpec& k, double xi) {
  if (!(xi >= 0.0)) throw std::invalid_argument("kernel_eval: squared distance must be >= 0");
  switch (k.kind) {
    case KernelSpec::Kind::gaussian: return std::exp(-0.5 * xi);
    case KernelSpec::Kind::stable_index: return std::exp(-std::pow(xi, 0.5 * k.b));
    case KernelSpec::Kind::gen_laplace: return std::pow(1.0 + xi, -k.b);
  }
  return 0.0;
}

}  // namespace skewgof
