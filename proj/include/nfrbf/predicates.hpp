#pragma once

#include "nfrbf/mesh.hpp"

namespace nfrbf::predicates {

// Sign-exact geometric predicates: a floating-point filter backed by a multiprecision
// re-evaluation whenever the filter cannot certify the sign.

/// > 0 if a, b, c are counter-clockwise, < 0 if clockwise, 0 if collinear.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

/// > 0 if d lies strictly inside the circle through counter-clockwise a, b, c.
int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

}  // namespace nfrbf::predicates
