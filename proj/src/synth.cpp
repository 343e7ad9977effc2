#include "rankpi/experiment.hpp"

#include "rankpi/error.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

namespace rankpi {

void SynthParams::validate() const {
    if (n < 1 || n_test < 0) {
        throw std::invalid_argument("synth: n must be >= 1 and n_test >= 0");
    }
    if (q < 2 || d < 1) {
        throw std::invalid_argument("synth: need q >= 2 and d >= 1");
    }
    if (k < 1 || k >= q) {
        throw std::invalid_argument("synth: labels per instance must satisfy 1 <= k < q");
    }
    if (!(sigma_star >= 0.0) || !(sigma >= sigma_star)) {
        throw std::invalid_argument("synth: need sigma >= sigma_star >= 0");
    }
}

SynthData synth_generate(const SynthParams &params) {
    params.validate();
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Eigen::MatrixXd teacher(params.q, params.d);
    for (int r = 0; r < params.q; ++r) {
        for (int c = 0; c < params.d; ++c) {
            teacher(r, c) = normal(rng);
        }
    }

    const int total = params.n + params.n_test;
    FeatureMatrix avail(total, params.d);
    FeatureMatrix priv(total, params.d);
    std::vector<LabelSet> labels;
    labels.reserve(static_cast<std::size_t>(total));
    Eigen::VectorXd z(params.d);
    for (int i = 0; i < total; ++i) {
        for (int c = 0; c < params.d; ++c) {
            z(c) = normal(rng);
        }
        for (int c = 0; c < params.d; ++c) {
            avail(i, c) = z(c) + params.sigma * normal(rng);
        }
        for (int c = 0; c < params.d; ++c) {
            priv(i, c) = z(c) + params.sigma_star * normal(rng);
        }
        labels.push_back(top_labels(teacher * z, params.k));
    }

    auto slice = [&](int first, int count) {
        std::vector<int> rows(static_cast<std::size_t>(count));
        for (int t = 0; t < count; ++t) {
            rows[static_cast<std::size_t>(t)] = first + t;
        }
        return rows;
    };
    MultiLabelDataset all(std::move(avail), std::move(priv), std::move(labels));
    SynthData data{all.subset(slice(0, params.n)), std::nullopt, teacher};
    if (params.n_test > 0) {
        data.test = all.subset(slice(params.n, params.n_test));
    }
    return data;
}

SynthFiles synth_paths(const std::string &prefix) {
    return SynthFiles{prefix + ".train.txt",     prefix + ".train.priv.txt", prefix + ".test.txt",
                      prefix + ".test.priv.txt", prefix + ".test.truth.txt", prefix + ".manifest.txt"};
}

SynthFiles write_synth(const SynthData &data, const SynthParams &params, const std::string &prefix) {
    const auto files = synth_paths(prefix);
    save_dataset(data.train, files.train, files.train_priv);
    if (data.test) {
        save_dataset(*data.test, files.test, files.test_priv);
        save_label_lists(data.test->labels(), files.test_truth);
    }
    std::ofstream manifest(files.manifest, std::ios::binary);
    if (!manifest) {
        throw DataError("cannot write '" + files.manifest.string() + "'");
    }
    manifest << "generator=rankpi-synth\n"
             << "seed=" << params.seed << '\n'
             << "n=" << params.n << '\n'
             << "n_test=" << params.n_test << '\n'
             << "q=" << params.q << '\n'
             << "d=" << params.d << '\n'
             << "sigma=" << format_real(params.sigma) << '\n'
             << "sigma_star=" << format_real(params.sigma_star) << '\n'
             << "k=" << params.k << '\n'
             << "train=" << files.train.filename().string() << '\n'
             << "train_priv=" << files.train_priv.filename().string() << '\n';
    if (data.test) {
        manifest << "test=" << files.test.filename().string() << '\n'
                 << "test_priv=" << files.test_priv.filename().string() << '\n'
                 << "test_truth=" << files.test_truth.filename().string() << '\n';
    }
    return files;
}

}  // namespace rankpi
