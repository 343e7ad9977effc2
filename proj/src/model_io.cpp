#include "rankpi/model.hpp"

#include "rankpi/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace rankpi {

namespace {

constexpr std::string_view magic = "rankpi-model";
constexpr std::string_view version = "v1";

std::string kernel_line(std::string_view space, const KernelSpec &spec) {
    std::ostringstream out;
    out << "kernel " << space << ' ' << to_string(spec.kind) << " gamma=" << format_real(spec.gamma)
        << " degree=" << spec.degree << " coef0=" << format_real(spec.coef0) << " bias=" << (spec.augment_bias ? 1 : 0);
    return out.str();
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return std::string(buf, 16);
}

class LineReader {
  public:
    explicit LineReader(std::string_view body) : body_{body} {}

    std::vector<std::string_view> next(std::string_view expected_keyword) {
        if (pos_ >= body_.size()) {
            throw ModelFormatError("truncated model file: missing '" + std::string(expected_keyword) + "' line");
        }
        const auto eol = body_.find('\n', pos_);
        const auto line = body_.substr(pos_, eol == std::string_view::npos ? std::string_view::npos : eol - pos_);
        pos_ = eol == std::string_view::npos ? body_.size() : eol + 1;
        ++line_no_;
        std::vector<std::string_view> tokens;
        std::size_t p = 0;
        while (p < line.size()) {
            const auto space = line.find(' ', p);
            const auto tok = line.substr(p, space == std::string_view::npos ? std::string_view::npos : space - p);
            if (!tok.empty()) {
                tokens.push_back(tok);
            }
            if (space == std::string_view::npos) {
                break;
            }
            p = space + 1;
        }
        if (tokens.empty() || tokens.front() != expected_keyword) {
            fail("expected '" + std::string(expected_keyword) + "'");
        }
        return tokens;
    }

    [[noreturn]] void fail(const std::string &what) const {
        throw ModelFormatError("model file line " + std::to_string(line_no_) + ": " + what);
    }

  private:
    std::string_view body_;
    std::size_t pos_ = 0;
    int line_no_ = 0;
};

template <typename T>
T parse_as(const LineReader &reader, std::string_view token) {
    T value{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        reader.fail("bad number '" + std::string(token) + "'");
    }
    return value;
}

/// key=value tokens after the leading fixed fields.
std::map<std::string, std::string_view, std::less<>> key_values(const LineReader &reader,
                                                                 const std::vector<std::string_view> &tokens,
                                                                 std::size_t first) {
    std::map<std::string, std::string_view, std::less<>> out;
    for (std::size_t t = first; t < tokens.size(); ++t) {
        const auto eq = tokens[t].find('=');
        if (eq == std::string_view::npos) {
            reader.fail("expected key=value, got '" + std::string(tokens[t]) + "'");
        }
        out.emplace(std::string(tokens[t].substr(0, eq)), tokens[t].substr(eq + 1));
    }
    return out;
}

std::string_view require(const LineReader &reader, const std::map<std::string, std::string_view, std::less<>> &kv,
                         std::string_view key) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        reader.fail("missing '" + std::string(key) + "'");
    }
    return it->second;
}

KernelSpec parse_kernel(const LineReader &reader, const std::vector<std::string_view> &tokens) {
    KernelSpec spec;
    try {
        spec.kind = parse_kernel_kind(tokens.at(2));
    } catch (const std::exception &) {
        reader.fail("bad kernel line");
    }
    const auto kv = key_values(reader, tokens, 3);
    spec.gamma = parse_as<double>(reader, require(reader, kv, "gamma"));
    spec.degree = parse_as<int>(reader, require(reader, kv, "degree"));
    spec.coef0 = parse_as<double>(reader, require(reader, kv, "coef0"));
    spec.augment_bias = parse_as<int>(reader, require(reader, kv, "bias")) != 0;
    try {
        spec.validate();
    } catch (const std::invalid_argument &e) {
        reader.fail(e.what());
    }
    return spec;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string serialize_model(const TrainedModel &m) {
    std::ostringstream out;
    const auto &cfg = m.train_config;
    out << magic << ' ' << version << '\n';
    out << "variant " << to_string(m.variant) << '\n';
    out << "q " << m.q << '\n';
    out << "config C=" << format_real(cfg.C) << " Cstar=" << format_real(cfg.C_star) << " D=" << format_real(cfg.D)
        << " epsilon=" << format_real(cfg.epsilon) << " tol=" << format_real(cfg.tol) << " max_iter=" << cfg.max_iter
        << '\n';
    out << kernel_line("available", m.kernel) << '\n';
    if (m.privileged_kernel) {
        out << kernel_line("privileged", *m.privileged_kernel) << '\n';
    }
    out << "size_predictor " << format_real(m.size_predictor.ridge_lambda);
    for (Eigen::Index c = 0; c < m.size_predictor.weights.size(); ++c) {
        out << ' ' << format_real(m.size_predictor.weights(c));
    }
    out << ' ' << format_real(m.size_predictor.intercept) << '\n';
    out << "sv " << m.support_count() << ' ' << m.d() << '\n';
    for (int i = 0; i < m.support_count(); ++i) {
        out << "row";
        for (Eigen::Index c = 0; c < m.support.cols(); ++c) {
            out << ' ' << format_real(m.support(i, c));
        }
        out << " g";
        for (Eigen::Index k = 0; k < m.g.cols(); ++k) {
            out << ' ' << format_real(m.g(i, k));
        }
        out << '\n';
    }
    std::string body = out.str();
    body += "end " + hex64(fnv1a64(body)) + '\n';
    return body;
}

TrainedModel parse_model(std::string_view text) {
    const auto first_eol = text.find('\n');
    const auto header = text.substr(0, first_eol);
    if (header.substr(0, magic.size()) != magic || (header.size() > magic.size() && header[magic.size()] != ' ')) {
        throw ModelFormatError("unrecognized model file");
    }
    if (header != std::string(magic) + ' ' + std::string(version)) {
        throw ModelFormatError("unsupported model version '" + std::string(header.substr(magic.size())) +
                               "' (expected " + std::string(version) + ")");
    }

    // The checksum line is the last line of the file.
    std::string_view trimmed = text;
    if (!trimmed.empty() && trimmed.back() == '\n') {
        trimmed.remove_suffix(1);
    }
    const auto last_eol = trimmed.rfind('\n');
    const auto end_line = last_eol == std::string_view::npos ? trimmed : trimmed.substr(last_eol + 1);
    if (last_eol == std::string_view::npos || end_line.substr(0, 4) != "end ") {
        throw ModelFormatError("truncated model file: missing checksum line");
    }
    const auto body = text.substr(0, last_eol + 1);
    if (end_line.substr(4) != hex64(fnv1a64(body))) {
        throw ModelFormatError("model checksum mismatch");
    }

    LineReader reader(body.substr(first_eol + 1));
    TrainedModel m;
    {
        const auto tokens = reader.next("variant");
        if (tokens.size() != 2) {
            reader.fail("bad variant line");
        }
        try {
            m.variant = parse_variant(tokens[1]);
        } catch (const std::invalid_argument &e) {
            reader.fail(e.what());
        }
    }
    {
        const auto tokens = reader.next("q");
        if (tokens.size() != 2) {
            reader.fail("bad q line");
        }
        m.q = parse_as<int>(reader, tokens[1]);
        if (m.q < 2) {
            reader.fail("q must be >= 2");
        }
    }
    {
        const auto tokens = reader.next("config");
        const auto kv = key_values(reader, tokens, 1);
        auto &cfg = m.train_config;
        cfg.variant = m.variant;
        cfg.C = parse_as<double>(reader, require(reader, kv, "C"));
        cfg.C_star = parse_as<double>(reader, require(reader, kv, "Cstar"));
        cfg.D = parse_as<double>(reader, require(reader, kv, "D"));
        cfg.epsilon = parse_as<double>(reader, require(reader, kv, "epsilon"));
        cfg.tol = parse_as<double>(reader, require(reader, kv, "tol"));
        cfg.max_iter = parse_as<int>(reader, require(reader, kv, "max_iter"));
    }
    {
        const auto tokens = reader.next("kernel");
        if (tokens.size() < 3 || tokens[1] != "available") {
            reader.fail("expected the available-space kernel");
        }
        m.kernel = parse_kernel(reader, tokens);
    }
    auto tokens = reader.next(uses_privileged(m.variant) ? "kernel" : "size_predictor");
    if (uses_privileged(m.variant)) {
        if (tokens.size() < 3 || tokens[1] != "privileged") {
            reader.fail("expected the privileged-space kernel");
        }
        m.privileged_kernel = parse_kernel(reader, tokens);
        tokens = reader.next("size_predictor");
    }
    if (tokens.size() < 4) {
        reader.fail("size_predictor needs lambda, weights and intercept");
    }
    const auto d = static_cast<Eigen::Index>(tokens.size() - 3);
    m.size_predictor.ridge_lambda = parse_as<double>(reader, tokens[1]);
    m.size_predictor.weights.resize(d);
    for (Eigen::Index c = 0; c < d; ++c) {
        m.size_predictor.weights(c) = parse_as<double>(reader, tokens[static_cast<std::size_t>(c) + 2]);
    }
    m.size_predictor.intercept = parse_as<double>(reader, tokens.back());
    m.size_predictor.q = m.q;

    const auto sv = reader.next("sv");
    if (sv.size() != 3) {
        reader.fail("bad sv line");
    }
    const auto count = parse_as<int>(reader, sv[1]);
    if (count < 0 || parse_as<Eigen::Index>(reader, sv[2]) != d) {
        reader.fail("support dimensions disagree with the size predictor");
    }
    m.g.resize(count, m.q);
    m.support.resize(count, d);
    for (int i = 0; i < count; ++i) {
        const auto row = reader.next("row");
        const auto expected = static_cast<std::size_t>(d + m.q + 2);
        if (row.size() != expected || row[static_cast<std::size_t>(d) + 1] != "g") {
            reader.fail("support row has the wrong shape");
        }
        for (Eigen::Index c = 0; c < d; ++c) {
            m.support(i, c) = parse_as<double>(reader, row[static_cast<std::size_t>(c) + 1]);
        }
        for (int k = 0; k < m.q; ++k) {
            m.g(i, k) = parse_as<double>(reader, row[static_cast<std::size_t>(d + k) + 2]);
        }
    }
    return m;
}

void save_model(const TrainedModel &m, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write model '" + path.string() + "'");
    }
    out << serialize_model(m);
    if (!out) {
        throw DataError("failed writing model '" + path.string() + "'");
    }
}

TrainedModel load_model(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open model '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model(buffer.str());
}

}  // namespace rankpi
