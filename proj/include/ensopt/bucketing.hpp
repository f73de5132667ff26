#pragma once

#include "ensopt/errors.hpp"

namespace ensopt {

// Uniform partition of [0,1] into equal-width half-open intervals (the last
// one closed). The nominal width sqrt(alpha*k/M) is rounded to an exact
// partition: num_buckets = ceil(1/w), effective width 1/num_buckets. A
// smaller effective width only tightens the consistency arguments.
class Bucketing {
public:
    Bucketing() = default;

    static Bucketing from_tolerance(double alpha, double label_bound, int k_scale);
    static Bucketing with_buckets(int num_buckets);

    int num_buckets() const { return num_buckets_; }
    double width() const { return 1.0 / num_buckets_; }
    double nominal_width() const { return nominal_width_; }

    // Interval index of value; 1.0 maps to the last bucket. Values outside
    // [0,1] are rejected.
    int bucket_of(double value) const;

    // Interval midpoint (j + 0.5) / num_buckets.
    double midpoint(int j) const { return (j + 0.5) / num_buckets_; }

private:
    int num_buckets_ = 1;
    double nominal_width_ = 1.0;
};

}  // namespace ensopt
