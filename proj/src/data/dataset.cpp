#include "data/dataset.hpp"

#include <fstream>
#include <sstream>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "data/rng.hpp"

namespace bho::data {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

MatrixXd Dataset::rows(const std::vector<int>& idx) const
{
    MatrixXd out(idx.size(), features.cols());
    for (size_t i = 0; i < idx.size(); i++)
    {
        out.row(i) = features.row(idx[i]);
    }
    return out;
}

VectorXd Dataset::target_rows(const std::vector<int>& idx) const
{
    VectorXd out(idx.size());
    for (size_t i = 0; i < idx.size(); i++)
    {
        out(i) = targets(idx[i]);
    }
    return out;
}

namespace {

std::vector<int> iota_range(int start, int count)
{
    std::vector<int> out(count);
    std::iota(out.begin(), out.end(), start);
    return out;
}

constexpr double kNoiseSigma = 2.0;

MatrixXd ar1_rows(Rng& rng, int n, int p)
{
    /* a_1 = eta_1, a_j = 0.5 a_{j-1} + sqrt(0.75) eta_j; exactly the banded
     * Cholesky factor of the 0.5^|j-k| Toeplitz matrix applied to eta. */
    MatrixXd a(n, p);
    const double carry = 0.5;
    const double fresh = std::sqrt(0.75);
    for (int i = 0; i < n; i++)
    {
        a(i, 0) = rng.normal();
        for (int j = 1; j < p; j++)
        {
            a(i, j) = carry * a(i, j - 1) + fresh * rng.normal();
        }
    }
    return a;
}

}  // namespace

Dataset gen_elastic_net(std::uint64_t seed, int n_tr, int n_val, int n_te, int p)
{
    constexpr int kSupport = 15;
    if (p < kSupport)
    {
        throw std::invalid_argument(fmt::format("gen_elastic_net: p >= {} required", kSupport));
    }
    if (n_tr < 1 || n_val < 1 || n_te < 1)
    {
        throw std::invalid_argument("gen_elastic_net: all split sizes must be positive");
    }

    Rng rng(seed);
    const int n = n_tr + n_val + n_te;

    Dataset d;
    d.task = Task::Regression;
    d.kind = "elastic-net";
    d.seed = seed;
    d.features = ar1_rows(rng, n, p);

    /* 15 support coordinates drawn without replacement, coefficients 1. */
    std::vector<int> coords = iota_range(0, p);
    rng.shuffle(coords);
    VectorXd beta = VectorXd::Zero(p);
    for (int i = 0; i < kSupport; i++)
    {
        beta(coords[i]) = 1.0;
    }

    d.targets = d.features * beta;
    for (int i = 0; i < n; i++)
    {
        d.targets(i) += kNoiseSigma * rng.normal();
    }

    d.train_idx = iota_range(0, n_tr);
    d.val_idx = iota_range(n_tr, n_val);
    d.test_idx = iota_range(n_tr + n_val, n_te);
    return d;
}

Dataset gen_sgl(std::uint64_t seed, int n, int p, int m)
{
    if (m < 3 || p % m != 0)
    {
        throw std::invalid_argument("gen_sgl: p must split into m >= 3 equal groups");
    }
    const int group_size = p / m;
    if (group_size < 5)
    {
        throw std::invalid_argument("gen_sgl: group size must be at least 5");
    }
    if (n < 3)
    {
        throw std::invalid_argument("gen_sgl: n too small");
    }

    Rng rng(seed);
    const int n_val = n / 3;
    const int n_te = 100;
    const int total = n + n_val + n_te;

    Dataset d;
    d.task = Task::Regression;
    d.kind = "sgl";
    d.seed = seed;
    d.features.resize(total, p);
    for (int i = 0; i < total; i++)
    {
        for (int j = 0; j < p; j++)
        {
            d.features(i, j) = rng.normal();
        }
    }

    /* Signal (1,2,3,4,5,0,...) in each of the first three groups. */
    VectorXd beta = VectorXd::Zero(p);
    for (int g = 0; g < 3; g++)
    {
        for (int i = 0; i < 5; i++)
        {
            beta(g * group_size + i) = i + 1;
        }
    }

    d.targets = d.features * beta;
    for (int i = 0; i < total; i++)
    {
        d.targets(i) += kNoiseSigma * rng.normal();
    }

    d.train_idx = iota_range(0, n);
    d.val_idx = iota_range(n, n_val);
    d.test_idx = iota_range(n + n_val, n_te);
    for (int g = 0; g < m; g++)
    {
        d.groups.push_back(iota_range(g * group_size, group_size));
    }
    return d;
}

Dataset gen_svm(std::uint64_t seed, int n, int p, double noise)
{
    if (n < 8 || p < 1)
    {
        throw std::invalid_argument("gen_svm: need n >= 8 and p >= 1");
    }
    Rng rng(seed);

    Dataset d;
    d.task = Task::Classification;
    d.kind = "svm";
    d.seed = seed;
    d.features.resize(n, p);
    d.targets.resize(n);

    VectorXd planted(p);
    for (int j = 0; j < p; j++)
    {
        planted(j) = rng.normal();
    }
    planted.normalize();
    const double intercept = 0.1 * rng.normal();

    for (int i = 0; i < n; i++)
    {
        for (int j = 0; j < p; j++)
        {
            d.features(i, j) = rng.normal();
        }
        const double margin = d.features.row(i).dot(planted) - intercept;
        d.targets(i) = (margin + noise * rng.normal()) >= 0.0 ? 1.0 : -1.0;
    }

    /* Same partition rule as the real sets: 3 floor(n/6) cross-validation
     * samples, the rest held out. */
    const int n_cv = 3 * (n / 6);
    d.train_idx = iota_range(0, n_cv);
    d.test_idx = iota_range(n_cv, n - n_cv);
    return d;
}

Dataset parse_libsvm(const std::string& text)
{
    Dataset d;
    d.task = Task::Classification;
    d.kind = "libsvm";

    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<double> labels;
    int max_index = 0;

    int line_no = 0;
    size_t pos = 0;
    while (pos < text.size())
    {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos)
        {
            end = text.size();
        }
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        line_no++;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
        {
            continue;
        }

        std::istringstream stream(line);
        std::string token;
        if (!(stream >> token))
        {
            continue;
        }
        double label;
        try
        {
            size_t used = 0;
            label = std::stod(token, &used);
            if (used != token.size())
            {
                throw std::invalid_argument("");
            }
        }
        catch (const std::exception&)
        {
            throw std::runtime_error(
                fmt::format("malformed label '{}' at line {}", token, line_no));
        }
        if (label == 0.0)
        {
            label = -1.0;
        }
        else if (label != 1.0 && label != -1.0)
        {
            throw std::runtime_error(
                fmt::format("unmappable label {} at line {} (want -1/0/+1)", label, line_no));
        }

        std::vector<std::pair<int, double>> row;
        int prev_index = 0;
        while (stream >> token)
        {
            const size_t colon = token.find(':');
            if (colon == std::string::npos)
            {
                throw std::runtime_error(
                    fmt::format("malformed token '{}' at line {}", token, line_no));
            }
            int index;
            double value;
            try
            {
                size_t used = 0;
                index = std::stoi(token.substr(0, colon), &used);
                if (used != colon)
                {
                    throw std::invalid_argument("");
                }
                const std::string value_text = token.substr(colon + 1);
                value = std::stod(value_text, &used);
                if (used != value_text.size())
                {
                    throw std::invalid_argument("");
                }
            }
            catch (const std::exception&)
            {
                throw std::runtime_error(
                    fmt::format("malformed token '{}' at line {}", token, line_no));
            }
            if (index < 1)
            {
                throw std::runtime_error(
                    fmt::format("index {} < 1 at line {}", index, line_no));
            }
            if (index <= prev_index)
            {
                throw std::runtime_error(
                    fmt::format("indices not increasing at line {}", line_no));
            }
            prev_index = index;
            max_index = std::max(max_index, index);
            row.emplace_back(index, value);
        }
        rows.push_back(std::move(row));
        labels.push_back(label);
    }

    const int n = static_cast<int>(rows.size());
    d.features = MatrixXd::Zero(n, max_index);
    d.targets.resize(n);
    for (int i = 0; i < n; i++)
    {
        d.targets(i) = labels[i];
        for (const auto& [index, value] : rows[i])
        {
            d.features(i, index - 1) = value;
        }
    }
    const int n_cv = 3 * (n / 6);
    d.train_idx = iota_range(0, n_cv);
    d.test_idx = iota_range(n_cv, n - n_cv);
    return d;
}

std::string serialize_libsvm(const Dataset& dataset)
{
    std::string out;
    for (int i = 0; i < dataset.num_samples(); i++)
    {
        out += dataset.targets(i) > 0 ? "+1" : "-1";
        for (int j = 0; j < dataset.num_features(); j++)
        {
            if (dataset.features(i, j) != 0.0)
            {
                out += fmt::format(" {}:{:.17g}", j + 1, dataset.features(i, j));
            }
        }
        out += '\n';
    }
    return out;
}

std::vector<int> kfold_split(int n, int k, std::uint64_t seed)
{
    if (k < 2 || n < k)
    {
        throw std::invalid_argument("kfold_split: need k >= 2 and n >= k");
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<int> fold_of(n);
    for (int i = 0; i < n; i++)
    {
        fold_of[order[i]] = i % k;
    }
    return fold_of;
}

namespace {

json split_json(const Dataset& d)
{
    return json{{"task", d.task == Task::Regression ? "regression" : "classification"},
                {"kind", d.kind},
                {"seed", d.seed},
                {"train", d.train_idx},
                {"val", d.val_idx},
                {"test", d.test_idx},
                {"groups", d.groups}};
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::string& stem)
{
    const bool classification = dataset.task == Task::Classification;
    const std::string data_path = stem + (classification ? ".libsvm" : ".csv");
    std::ofstream data_file(data_path);
    if (!data_file)
    {
        throw std::runtime_error("save_dataset: cannot write " + data_path);
    }
    if (classification)
    {
        data_file << serialize_libsvm(dataset);
    }
    else
    {
        for (int i = 0; i < dataset.num_samples(); i++)
        {
            data_file << fmt::format("{:.17g}", dataset.targets(i));
            for (int j = 0; j < dataset.num_features(); j++)
            {
                data_file << fmt::format(",{:.17g}", dataset.features(i, j));
            }
            data_file << '\n';
        }
    }
    data_file.close();

    std::ofstream sidecar(stem + ".json");
    if (!sidecar)
    {
        throw std::runtime_error("save_dataset: cannot write " + stem + ".json");
    }
    sidecar << split_json(dataset).dump(2) << '\n';
}

Dataset load_dataset(const std::string& stem)
{
    std::ifstream sidecar(stem + ".json");
    if (!sidecar)
    {
        throw std::runtime_error("load_dataset: cannot read " + stem + ".json");
    }
    json meta = json::parse(sidecar);

    Dataset d;
    d.task = meta.at("task") == "classification" ? Task::Classification : Task::Regression;
    d.kind = meta.at("kind");
    d.seed = meta.at("seed");
    d.train_idx = meta.at("train").get<std::vector<int>>();
    d.val_idx = meta.at("val").get<std::vector<int>>();
    d.test_idx = meta.at("test").get<std::vector<int>>();
    d.groups = meta.at("groups").get<std::vector<std::vector<int>>>();

    if (d.task == Task::Classification)
    {
        std::ifstream data_file(stem + ".libsvm");
        if (!data_file)
        {
            throw std::runtime_error("load_dataset: cannot read " + stem + ".libsvm");
        }
        std::stringstream buf;
        buf << data_file.rdbuf();
        Dataset parsed = parse_libsvm(buf.str());
        d.features = std::move(parsed.features);
        d.targets = std::move(parsed.targets);
    }
    else
    {
        std::ifstream data_file(stem + ".csv");
        if (!data_file)
        {
            throw std::runtime_error("load_dataset: cannot read " + stem + ".csv");
        }
        std::vector<std::vector<double>> rows;
        std::string line;
        while (std::getline(data_file, line))
        {
            if (line.empty())
            {
                continue;
            }
            std::vector<double> row;
            std::istringstream stream(line);
            std::string cell;
            while (std::getline(stream, cell, ','))
            {
                row.push_back(std::stod(cell));
            }
            rows.push_back(std::move(row));
        }
        if (rows.empty())
        {
            throw std::runtime_error("load_dataset: empty data file");
        }
        const int n = static_cast<int>(rows.size());
        const int p = static_cast<int>(rows.front().size()) - 1;
        d.features.resize(n, p);
        d.targets.resize(n);
        for (int i = 0; i < n; i++)
        {
            if (static_cast<int>(rows[i].size()) != p + 1)
            {
                throw std::runtime_error("load_dataset: ragged csv");
            }
            d.targets(i) = rows[i][0];
            for (int j = 0; j < p; j++)
            {
                d.features(i, j) = rows[i][j + 1];
            }
        }
    }
    return d;
}

std::string manifest(const Dataset& dataset, const std::string& stem)
{
    std::string out;
    out += fmt::format("kind: {}\n", dataset.kind);
    out += fmt::format("seed: {}\n", dataset.seed);
    out += fmt::format("samples: {}\n", dataset.num_samples());
    out += fmt::format("features: {}\n", dataset.num_features());
    out += fmt::format("splits: train={} val={} test={}\n", dataset.train_idx.size(),
                       dataset.val_idx.size(), dataset.test_idx.size());
    if (!dataset.groups.empty())
    {
        out += fmt::format("groups: {} of size {}\n", dataset.groups.size(),
                           dataset.groups.front().size());
    }
    out += fmt::format("files: {}{} {}.json\n", stem,
                       dataset.task == Task::Classification ? ".libsvm" : ".csv", stem);
    return out;
}

}  // namespace bho::data
