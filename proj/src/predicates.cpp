#include "nfrbf/predicates.hpp"

#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace nfrbf::predicates {

namespace {

// Wide enough that sums of products of four coordinate differences are exact for any pair of
// doubles within a modest exponent range.
using Exact = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<2200, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

int sign(double v) { return (v > 0.0) - (v < 0.0); }

int orient_exact(const Vec2& a, const Vec2& b, const Vec2& c) {
    const Exact acx = Exact(a.x()) - Exact(c.x());
    const Exact bcx = Exact(b.x()) - Exact(c.x());
    const Exact acy = Exact(a.y()) - Exact(c.y());
    const Exact bcy = Exact(b.y()) - Exact(c.y());
    const Exact det = acx * bcy - acy * bcx;
    return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

int incircle_exact(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const Exact adx = Exact(a.x()) - Exact(d.x()), ady = Exact(a.y()) - Exact(d.y());
    const Exact bdx = Exact(b.x()) - Exact(d.x()), bdy = Exact(b.y()) - Exact(d.y());
    const Exact cdx = Exact(c.x()) - Exact(d.x()), cdy = Exact(c.y()) - Exact(d.y());
    const Exact alift = adx * adx + ady * ady;
    const Exact blift = bdx * bdx + bdy * bdy;
    const Exact clift = cdx * cdx + cdy * cdy;
    const Exact det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                      clift * (adx * bdy - bdx * ady);
    return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

}  // namespace

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double detleft = (a.x() - c.x()) * (b.y() - c.y());
    const double detright = (a.y() - c.y()) * (b.x() - c.x());
    const double det = detleft - detright;
    const double bound = 8.0 * kEps * (std::abs(detleft) + std::abs(detright));
    if (std::abs(det) > bound) return sign(det);
    return orient_exact(a, b, c);
}

int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double adx = a.x() - d.x(), ady = a.y() - d.y();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                             (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                             (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    if (std::abs(det) > 16.0 * kEps * permanent) return sign(det);
    return incircle_exact(a, b, c, d);
}

}  // namespace nfrbf::predicates
