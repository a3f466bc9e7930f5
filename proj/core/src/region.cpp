#include "supercal/region.hpp"

#include "supercal/quadrature.hpp"

#include <cmath>
#include <limits>

namespace supercal {

double BoundingBox::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
}

Region Region::ball(std::vector<double> center, double radius) {
    if (!(radius > 0.0)) throw InvalidArgument("region: ball radius must be positive");
    Region r;
    r.kind_ = Kind::Ball;
    r.n_ = int(center.size());
    r.outer_ = radius;
    for (std::size_t i = 0; i < center.size(); ++i) {
        r.lo_.push_back(center[i] - radius);
        r.hi_.push_back(center[i] + radius);
    }
    r.center_ = std::move(center);
    return r;
}

Region Region::box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size() || lo.empty()) throw InvalidArgument("region: box shape mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i])) throw InvalidArgument("region: empty box axis");
    Region r;
    r.kind_ = Kind::Box;
    r.n_ = int(lo.size());
    r.lo_ = std::move(lo);
    r.hi_ = std::move(hi);
    return r;
}

Region Region::shell(std::vector<double> center, double inner, double outer) {
    if (!(0.0 <= inner && inner < outer)) throw InvalidArgument("region: shell radii out of order");
    Region r;
    r.kind_ = Kind::Shell;
    r.n_ = int(center.size());
    r.inner_ = inner;
    r.outer_ = outer;
    for (std::size_t i = 0; i < center.size(); ++i) {
        r.lo_.push_back(center[i] - outer);
        r.hi_.push_back(center[i] + outer);
    }
    r.center_ = std::move(center);
    return r;
}

Region Region::sublevel(ScalarField phi, double level, std::vector<double> lo,
                        std::vector<double> hi) {
    if (!phi.valid()) throw InvalidArgument("region: sublevel needs a field");
    if (int(lo.size()) != phi.n_vars() || lo.size() != hi.size())
        throw InvalidArgument("region: sublevel box shape mismatch");
    Region r;
    r.kind_ = Kind::Sublevel;
    r.n_ = phi.n_vars();
    r.phi_ = std::move(phi);
    r.level_ = level;
    r.lo_ = std::move(lo);
    r.hi_ = std::move(hi);
    return r;
}

Region Region::affine_image(Eigen::MatrixXd map, std::vector<double> shift,
                            std::vector<double> lo, std::vector<double> hi) {
    int n = int(shift.size());
    if (map.rows() != n || map.cols() != n || int(lo.size()) != n || int(hi.size()) != n)
        throw InvalidArgument("region: affine image shape mismatch");
    Region r;
    r.kind_ = Kind::AffineImage;
    r.n_ = n;
    double det = map.determinant();
    if (std::abs(det) < 1e-14) throw InvalidArgument("region: affine map is singular");
    r.map_inv_ = map.inverse();
    r.map_ = std::move(map);
    r.abs_det_ = std::abs(det);
    r.shift_ = std::move(shift);
    r.lo_ = std::move(lo);
    r.hi_ = std::move(hi);
    return r;
}

bool Region::contains(std::span<const double> x) const {
    if (int(x.size()) != n_) throw InvalidArgument("region: point dimension mismatch");
    switch (kind_) {
    case Kind::Ball:
    case Kind::Shell: {
        double r2 = 0.0;
        for (int i = 0; i < n_; ++i) {
            double d = x[i] - center_[i];
            r2 += d * d;
        }
        double r = std::sqrt(r2);
        return kind_ == Kind::Ball ? r < outer_ : (inner_ <= r && r < outer_);
    }
    case Kind::Box: {
        for (int i = 0; i < n_; ++i)
            if (x[i] < lo_[i] || x[i] >= hi_[i]) return false;
        return true;
    }
    case Kind::Sublevel: {
        for (int i = 0; i < n_; ++i)
            if (x[i] < lo_[i] || x[i] >= hi_[i]) return false;
        return phi_.eval(x) < level_;
    }
    case Kind::AffineImage: {
        Eigen::VectorXd y(n_);
        for (int i = 0; i < n_; ++i) y[i] = x[i] - shift_[i];
        Eigen::VectorXd t = map_inv_ * y;
        for (int i = 0; i < n_; ++i)
            if (t[i] < lo_[i] || t[i] >= hi_[i]) return false;
        return true;
    }
    }
    return false;
}

BoundingBox Region::bounding() const {
    if (kind_ != Kind::AffineImage) return {lo_, hi_};
    BoundingBox b;
    b.lo.assign(n_, std::numeric_limits<double>::infinity());
    b.hi.assign(n_, -std::numeric_limits<double>::infinity());
    for (int corner = 0; corner < (1 << n_); ++corner) {
        Eigen::VectorXd t(n_);
        for (int i = 0; i < n_; ++i) t[i] = ((corner >> i) & 1) ? hi_[i] : lo_[i];
        Eigen::VectorXd x = map_ * t;
        for (int i = 0; i < n_; ++i) {
            b.lo[i] = std::min(b.lo[i], x[i] + shift_[i]);
            b.hi[i] = std::max(b.hi[i], x[i] + shift_[i]);
        }
    }
    return b;
}

double Region::sampling_weight() const {
    double v = 1.0;
    for (int i = 0; i < n_; ++i) v *= hi_[i] - lo_[i];
    return kind_ == Kind::AffineImage ? v * abs_det_ : v;
}

bool Region::sample(SplitMix64& rng, std::vector<double>& out) const {
    out.resize(std::size_t(n_));
    if (kind_ == Kind::AffineImage) {
        Eigen::VectorXd t(n_);
        for (int i = 0; i < n_; ++i) t[i] = rng.next_in(lo_[i], hi_[i]);
        Eigen::VectorXd x = map_ * t;
        for (int i = 0; i < n_; ++i) out[i] = x[i] + shift_[i];
        return true;
    }
    for (int i = 0; i < n_; ++i) out[i] = rng.next_in(lo_[i], hi_[i]);
    if (kind_ == Kind::Box) return true;
    return contains(out);
}

bool Region::grid_point(std::span<const double> t, std::vector<double>& out) const {
    out.resize(std::size_t(n_));
    if (kind_ == Kind::AffineImage) {
        Eigen::VectorXd u(n_);
        for (int i = 0; i < n_; ++i) u[i] = lo_[i] + t[i] * (hi_[i] - lo_[i]);
        Eigen::VectorXd x = map_ * u;
        for (int i = 0; i < n_; ++i) out[i] = x[i] + shift_[i];
        return true;
    }
    for (int i = 0; i < n_; ++i) out[i] = lo_[i] + t[i] * (hi_[i] - lo_[i]);
    if (kind_ == Kind::Box) return true;
    return contains(out);
}

std::optional<double> Region::exact_volume() const {
    switch (kind_) {
    case Kind::Ball:
        return ball_volume(n_, outer_);
    case Kind::Shell:
        return ball_volume(n_, outer_) - ball_volume(n_, inner_);
    case Kind::Box:
    case Kind::AffineImage:
        return sampling_weight();
    case Kind::Sublevel:
        return std::nullopt;
    }
    return std::nullopt;
}

const std::vector<double>* Region::center() const {
    if (kind_ == Kind::Ball || kind_ == Kind::Shell) return &center_;
    return nullptr;
}

} // namespace supercal
