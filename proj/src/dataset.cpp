#include "ensopt/dataset.hpp"

#include <charconv>
#include <cmath>

#include <json.hpp>

#include "ensopt/errors.hpp"
#include "ensopt/io.hpp"

namespace ensopt {

Dataset::Dataset(Matrix features, Matrix labels, std::vector<int> group_id, double label_bound,
                 int n_groups, uint64_t seed, LabelAffine affine)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      group_id_(std::move(group_id)),
      label_bound_(label_bound),
      n_groups_(n_groups),
      seed_(seed),
      affine_(affine) {
    validate();
    build_inputs();
}

void Dataset::validate() const {
    if (features_.rows() <= 0 || features_.cols() <= 0 || labels_.cols() <= 0)
        throw ConfigError("dataset: n, p, d must be positive");
    if (labels_.rows() != features_.rows())
        throw ConfigError("dataset: feature and label row counts disagree");
    if (static_cast<int>(group_id_.size()) != features_.rows())
        throw ConfigError("dataset: group column length disagrees with n");
    if (label_bound_ <= 0.0) throw ConfigError("dataset: label bound must be positive");
    for (int g : group_id_)
        if (g < 0 || g >= n_groups_) throw ConfigError("dataset: group id outside [0, n_groups)");
    for (int i = 0; i < labels_.rows(); ++i)
        for (int j = 0; j < labels_.cols(); ++j) {
            const double y = labels_(i, j);
            if (!std::isfinite(y) || y < 0.0 || y > label_bound_)
                throw ConfigError("dataset: label outside [0, M]");
        }
}

void Dataset::build_inputs() {
    inputs_ = Matrix(features_.rows(), features_.cols() + 1);
    for (int i = 0; i < features_.rows(); ++i) {
        for (int j = 0; j < features_.cols(); ++j) inputs_(i, j) = features_(i, j);
        inputs_(i, features_.cols()) = static_cast<double>(group_id_[i]);
    }
}

void Dataset::save_csv(const std::filesystem::path& path) const {
    CsvWriter w(path);
    std::vector<std::string> header;
    for (int j = 0; j < p(); ++j) header.push_back("f" + std::to_string(j));
    header.push_back("g");
    for (int j = 0; j < d(); ++j) header.push_back("y" + std::to_string(j));
    w.row(header);
    for (int i = 0; i < n(); ++i) {
        std::vector<std::string> row;
        row.reserve(p() + d() + 1);
        for (int j = 0; j < p(); ++j) row.push_back(fmt_double(features_(i, j)));
        row.push_back(std::to_string(group_id_[i]));
        for (int j = 0; j < d(); ++j) row.push_back(fmt_double(labels_(i, j)));
        w.row(row);
    }

    nlohmann::json meta = {
        {"n", n()},          {"p", p()},
        {"d", d()},          {"M", label_bound_},
        {"n_groups", n_groups_}, {"seed", seed_},
        {"label_affine", {{"scale", affine_.scale}, {"shift", affine_.shift}}},
    };
    write_text_file(path.string() + ".meta.json", meta.dump(2) + "\n");
}

namespace {
double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc()) throw ConfigError("dataset csv: bad numeric field '" + s + "'");
    return v;
}
}  // namespace

Dataset Dataset::load_csv(const std::filesystem::path& path) {
    const auto meta = nlohmann::json::parse(read_text_file(path.string() + ".meta.json"));
    const int p = meta.at("p").get<int>();
    const int d = meta.at("d").get<int>();

    const auto rows = read_csv(path);
    if (rows.size() < 2) throw ConfigError("dataset csv: no data rows in " + path.string());
    const int n = static_cast<int>(rows.size()) - 1;
    if (static_cast<int>(rows[0].size()) != p + d + 1)
        throw ConfigError("dataset csv: header width disagrees with metadata");

    Matrix features(n, p);
    Matrix labels(n, d);
    std::vector<int> groups(n);
    for (int i = 0; i < n; ++i) {
        const auto& r = rows[i + 1];
        if (static_cast<int>(r.size()) != p + d + 1)
            throw ConfigError("dataset csv: row " + std::to_string(i + 1) + " has wrong width");
        for (int j = 0; j < p; ++j) features(i, j) = parse_double(r[j]);
        groups[i] = static_cast<int>(parse_double(r[p]));
        for (int j = 0; j < d; ++j) labels(i, j) = parse_double(r[p + 1 + j]);
    }

    LabelAffine affine{meta.at("label_affine").at("scale").get<double>(),
                       meta.at("label_affine").at("shift").get<double>()};
    return Dataset(std::move(features), std::move(labels), std::move(groups),
                   meta.at("M").get<double>(), meta.at("n_groups").get<int>(),
                   meta.at("seed").get<uint64_t>(), affine);
}

}  // namespace ensopt
