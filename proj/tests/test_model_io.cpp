#include "rankpi/error.hpp"
#include "rankpi/experiment.hpp"
#include "rankpi/model.hpp"

#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace rankpi;

namespace {

TrainedModel trained(Variant v) {
    SynthParams sp;
    sp.seed = 4;
    sp.n = 30;
    sp.q = 3;
    sp.d = 4;
    const auto data = synth_generate(sp);
    TrainConfig cfg;
    cfg.variant = v;
    cfg.max_iter = 500;
    KernelRequest rbf{KernelKind::rbf};
    KernelRequest poly{KernelKind::polynomial, 0.5, 3, 0.25};
    return train(data.train, cfg, rbf.resolve(data.train.available()), poly.resolve(data.train.privileged())).model;
}

std::string expect_format_error(const std::string &text) {
    try {
        (void)parse_model(text);
    } catch (const ModelFormatError &e) {
        return e.what();
    }
    return "accepted";
}

std::string with_checksum(const std::string &body) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(body)));
    return body + "end " + hex + "\n";
}

}  // namespace

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("models round-trip through text and files") {
    std::mt19937_64 rng(10);
    for (auto v : all_variants) {
        const auto m = trained(v);
        const auto text = serialize_model(m);
        const auto back = parse_model(text);
        CHECK(serialize_model(back) == text);
        CHECK(back.variant == m.variant);
        CHECK(back.train_config == m.train_config);
        CHECK(back.privileged_kernel.has_value() == uses_privileged(v));
        const auto X = testing::random_features(rng, 100, m.d());
        CHECK((decision_values_rows(m, X) - decision_values_rows(back, X)).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(predict_rows(m, X) == predict_rows(back, X));
    }
    const auto path = std::filesystem::temp_directory_path() / "rankpi-unit-model.txt";
    const auto m = trained(Variant::full);
    save_model(m, path);
    CHECK(serialize_model(load_model(path)) == serialize_model(m));
    std::filesystem::remove(path);
    CHECK_THROWS_AS((void)load_model(path), DataError);
}

TEST_CASE("hand-built model file") {
    const std::string body =
        "rankpi-model v1\n"
        "variant ranking_only\n"
        "q 2\n"
        "config C=1 Cstar=1 D=1 epsilon=0.10000000000000001 tol=1.0000000000000001e-05 max_iter=10000\n"
        "kernel available linear gamma=1 degree=2 coef0=1 bias=1\n"
        "size_predictor 1 0 0 1\n"
        "sv 1 2\n"
        "row 1 0 g 1 -1\n";
    const auto m = parse_model(with_checksum(body));
    CHECK(m.q == 2);
    CHECK(m.support_count() == 1);
    Eigen::VectorXd x(2);
    x << 1.0, 0.0;
    const auto s = decision_values(m, x);
    CHECK(s(0) == 2.0);
    CHECK(s(1) == -2.0);
    CHECK(predict(m, x) == LabelSet({0}, 2));
    CHECK(serialize_model(m) == with_checksum(body));
}

TEST_CASE("corrupted model files are rejected") {
    const auto text = serialize_model(trained(Variant::full));
    CHECK(expect_format_error("not-a-model v1\n" + text.substr(text.find('\n') + 1)).find("unrecognized model file") !=
          std::string::npos);
    std::string v2 = text;
    v2.replace(v2.find("v1"), 2, "v2");
    CHECK(expect_format_error(v2).find("unsupported model version") != std::string::npos);
    CHECK(expect_format_error(text.substr(0, text.size() / 2)).find("truncated") != std::string::npos);
    CHECK(expect_format_error(text.substr(0, text.rfind("end "))).find("truncated") != std::string::npos);

    std::string bad_sum = text;
    auto &digit = bad_sum[bad_sum.rfind("end ") + 4];
    digit = digit == 'f' ? 'e' : 'f';
    CHECK(expect_format_error(bad_sum).find("checksum") != std::string::npos);

    std::string bad_body = text;
    const auto row = bad_body.find("row ");
    bad_body[row + 4] = bad_body[row + 4] == '1' ? '2' : '1';
    CHECK(expect_format_error(bad_body).find("checksum") != std::string::npos);
    CHECK_THROWS_AS((void)parse_model(""), ModelFormatError);
}
