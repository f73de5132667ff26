#include "ensopt/bucketing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ensopt {

Bucketing Bucketing::from_tolerance(double alpha, double label_bound, int k_scale) {
    if (alpha <= 0.0) throw ConfigError("bucketing: alpha must be positive");
    if (label_bound <= 0.0) throw ConfigError("bucketing: label bound must be positive");
    if (k_scale < 1) throw ConfigError("bucketing: k_scale must be >= 1");
    if (alpha * k_scale > label_bound)
        throw ConfigError("bucketing: alpha*k exceeds the label bound, nominal width would exceed 1");
    const double w = std::sqrt(alpha * k_scale / label_bound);
    Bucketing b;
    b.nominal_width_ = w;
    // The 1e-9 slack keeps e.g. 1/0.1 from rounding up to 11 buckets.
    b.num_buckets_ = static_cast<int>(std::ceil(1.0 / w - 1e-9));
    b.num_buckets_ = std::max(b.num_buckets_, 1);
    return b;
}

Bucketing Bucketing::with_buckets(int num_buckets) {
    if (num_buckets < 1) throw ConfigError("bucketing: need at least one bucket");
    Bucketing b;
    b.num_buckets_ = num_buckets;
    b.nominal_width_ = 1.0 / num_buckets;
    return b;
}

int Bucketing::bucket_of(double value) const {
    if (!(value >= 0.0 && value <= 1.0))
        throw ConfigError("bucket_of: value " + std::to_string(value) + " outside [0,1]");
    const int j = static_cast<int>(value * num_buckets_);
    return std::min(j, num_buckets_ - 1);
}

}  // namespace ensopt
