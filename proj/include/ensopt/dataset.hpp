#pragma once
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ensopt/linalg.hpp"

namespace ensopt {

// Affine map applied to raw synthetic labels to land them in [0, M]:
// mapped = scale * raw + shift (then clipped). Recorded so payoffs can be
// traced back to raw units.
struct LabelAffine {
    double scale = 1.0;
    double shift = 0.0;
};

// Empirical sample: feature rows, bounded label rows, and a group id per row.
// Labels live in [0, M]^d; the group column is kept out of the numeric
// feature matrix and appended as one extra integer-valued model input.
class Dataset {
public:
    Dataset() = default;
    Dataset(Matrix features, Matrix labels, std::vector<int> group_id, double label_bound,
            int n_groups, uint64_t seed = 0, LabelAffine affine = {});

    int n() const { return features_.rows(); }
    int p() const { return features_.cols(); }
    int d() const { return labels_.cols(); }
    int n_groups() const { return n_groups_; }
    double label_bound() const { return label_bound_; }
    uint64_t seed() const { return seed_; }
    const LabelAffine& label_affine() const { return affine_; }

    const Matrix& features() const { return features_; }
    const Matrix& labels() const { return labels_; }
    const std::vector<int>& group_id() const { return group_id_; }

    std::span<const double> label_row(int i) const { return labels_.row(i); }
    // Model input: the p numeric features with the group id appended.
    std::span<const double> input_row(int i) const { return inputs_.row(i); }
    int input_dim() const { return inputs_.cols(); }

    // CSV with header f0,...,f{p-1},g,y0,...,y{d-1} plus a JSON metadata
    // sidecar at <path>.meta.json.
    void save_csv(const std::filesystem::path& path) const;
    static Dataset load_csv(const std::filesystem::path& path);

private:
    void validate() const;
    void build_inputs();

    Matrix features_;
    Matrix labels_;
    Matrix inputs_;  // n x (p+1), features plus group column
    std::vector<int> group_id_;
    double label_bound_ = 1.0;
    int n_groups_ = 1;
    uint64_t seed_ = 0;
    LabelAffine affine_;
};

}  // namespace ensopt
