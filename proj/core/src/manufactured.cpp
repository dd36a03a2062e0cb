// SPDX-License-Identifier: Apache-2.0
#include "curlrec/manufactured.hpp"

#include <cmath>

namespace curlrec {

Manufactured manufactured_case(const std::string& name, double omega) {
  const double w2 = omega * omega;
  Manufactured m;
  m.name = name;
  if (name == "poly2") {
    m.has_exact = true;
    m.exact.value = [](const Vec2& x) {
      return Vec2(x.y() * (1.0 - x.y()), x.x() * (1.0 - x.x()));
    };
    m.exact.curl = [](const Vec2& x) { return 2.0 * x.y() - 2.0 * x.x(); };
    // J = omega^2 E + rot(curl E); rot(2y - 2x) = (2, 2)
    m.source.J = [w2](const Vec2& x) {
      return Vec2(w2 * x.y() * (1.0 - x.y()) + 2.0,
                  w2 * x.x() * (1.0 - x.x()) + 2.0);
    };
    // each component depends only on the other variable
    m.source.div_J = [](const Vec2&) { return 0.0; };
    return m;
  }
  if (name == "trig") {
    const double pi = std::acos(-1.0);
    auto ss = [pi](const Vec2& x) {
      return std::sin(pi * x.x()) * std::sin(pi * x.y());
    };
    auto cc = [pi](const Vec2& x) {
      return std::cos(pi * x.x()) * std::cos(pi * x.y());
    };
    m.has_exact = true;
    m.exact.value = [ss](const Vec2& x) {
      double s = ss(x);
      return Vec2(s, s);
    };
    m.exact.curl = [pi](const Vec2& x) {
      return pi * (std::cos(pi * x.x()) * std::sin(pi * x.y()) -
                   std::sin(pi * x.x()) * std::cos(pi * x.y()));
    };
    // J = omega^2 E + rot(curl E) with rot(curl E) = pi^2 (cc + ss) (1,1)
    m.source.J = [w2, pi, ss, cc](const Vec2& x) {
      double v = w2 * ss(x) + pi * pi * (cc(x) + ss(x));
      return Vec2(v, v);
    };
    m.source.div_J = [w2, pi](const Vec2& x) {
      return w2 * pi *
             (std::cos(pi * x.x()) * std::sin(pi * x.y()) +
              std::sin(pi * x.x()) * std::cos(pi * x.y()));
    };
    return m;
  }
  if (name == "lshape") {
    m.has_exact = false;
    m.source.J = [](const Vec2&) { return Vec2(1.0, 1.0); };
    m.source.div_J = [](const Vec2&) { return 0.0; };
    return m;
  }
  throw std::invalid_argument("unknown manufactured case: " + name);
}

}  // namespace curlrec
