#include "brw/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "brw/errors.hpp"

namespace brw {

namespace {

constexpr double kProbSumTolerance = 1e-12;

mpq_class parse_rational_string(const std::string& s) {
    // Accepts "p/q" or a plain integer; GMP validates the digits.
    mpq_class q;
    if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0 || q.get_den() == 0)
        throw validation_error("", "probability string '" + s + "' is not an integer or p/q rational");
    q.canonicalize();
    return q;
}

}  // namespace

bool ModelSpec::exact() const {
    mpq_class sum = 0;
    for (const auto& o : outcomes) {
        if (!o.prob_exact) return false;
        sum += *o.prob_exact;
    }
    return !outcomes.empty() && sum == 1;
}

double ModelSpec::mean_offspring() const {
    double m = 0.0;
    for (const auto& o : outcomes) m += o.prob * static_cast<double>(o.displacements.size());
    return m;
}

long long IntensityMeasure::min_site() const { return weights.begin()->first; }
long long IntensityMeasure::max_site() const { return weights.rbegin()->first; }

bool ValidationReport::all_pass() const {
    return std::all_of(results.begin(), results.end(), [](const AssumptionResult& r) { return r.pass; });
}

std::string ValidationReport::failing_letters() const {
    std::string s;
    for (const auto& r : results)
        if (!r.pass) s.push_back(r.letter);
    return s;
}

IntensityMeasure intensity(const ModelSpec& model) {
    IntensityMeasure im;
    im.exact = model.exact();
    for (const auto& o : model.outcomes) {
        for (long long d : o.displacements) {
            im.weights[d] += o.prob;
            if (im.exact) im.weights_exact[d] += *o.prob_exact;
        }
    }
    im.mass = 0.0;
    im.mass_exact = 0;
    for (const auto& [k, w] : im.weights) im.mass += w;
    if (im.exact)
        for (const auto& [k, w] : im.weights_exact) im.mass_exact += w;
    return im;
}

ValidationReport validate(const ModelSpec& model) {
    ValidationReport rep;
    IntensityMeasure im = intensity(model);

    AssumptionResult a{'A', im.weights.size() >= 2,
                       im.weights.size() >= 2
                           ? "intensity support has " + std::to_string(im.weights.size()) + " points"
                           : "intensity support has fewer than two points"};
    rep.results.push_back(a);

    bool nonempty = std::all_of(model.outcomes.begin(), model.outcomes.end(),
                                [](const Outcome& o) { return !o.displacements.empty(); });
    bool supercritical = im.exact ? im.mass_exact > 1 : im.mass > 1.0;
    std::string bdetail;
    if (!nonempty) bdetail = "an outcome produces no children";
    else if (!supercritical) bdetail = "mean offspring m <= 1";
    else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "every outcome reproduces; m = %.12g > 1", im.mass);
        bdetail = buf;
    }
    rep.results.push_back({'B', nonempty && supercritical, bdetail});

    rep.results.push_back({'C', true, "finite support: exponential moments exist for every tilt"});
    rep.results.push_back({'D', true, "finite support: one-step tilted mass is bounded on compacts"});

    long long h = 0;
    long long kmin = im.weights.empty() ? 0 : im.min_site();
    for (const auto& [k, w] : im.weights) h = std::gcd(h, k - kmin);
    std::string edetail;
    bool epass = h == 1;
    if (im.weights.size() <= 1) {
        epass = false;
        edetail = "support is a single point";
    } else if (!epass) {
        long long residue = ((kmin % h) + h) % h;
        edetail = "support lies in a + h*Z with (a, h) = (" + std::to_string(residue) + ", " + std::to_string(h) + ")";
    } else {
        edetail = "support spans the full integer lattice (span 1)";
    }
    rep.results.push_back({'E', epass, edetail});

    return rep;
}

long long AffineMap::site_to_normalized(long long n, long long k) const {
    long long num = k - offset * n;
    if (num % span != 0)
        throw std::invalid_argument("site is not on the model lattice");
    return num / span;
}

std::pair<ModelSpec, AffineMap> lattice_normalize(const ModelSpec& model) {
    IntensityMeasure im = intensity(model);
    if (im.weights.size() <= 1)
        throw std::invalid_argument("cannot normalize a single-point support");

    long long kmin = im.min_site();
    long long h = 0;
    for (const auto& [k, w] : im.weights) h = std::gcd(h, k - kmin);
    if (h == 1)
        throw std::invalid_argument("model already has span 1 (normalization is a no-op)");

    ValidationReport rep = validate(model);
    std::string other;
    for (const auto& r : rep.results)
        if (!r.pass && r.letter != 'E') other.push_back(r.letter);
    if (!other.empty())
        throw validation_error(other, "normalization requires a model failing only the span assumption");

    ModelSpec out = model;
    for (auto& o : out.outcomes)
        for (auto& d : o.displacements) d = (d - kmin) / h;
    return {out, AffineMap{kmin, h}};
}

ModelSpec parse_model(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("", std::string("model JSON parse failure: ") + e.what());
    }
    if (!j.is_object() || !j.contains("outcomes") || !j["outcomes"].is_array() || j["outcomes"].empty())
        throw validation_error("", "model JSON must contain a nonempty 'outcomes' array");

    ModelSpec model;
    for (const auto& jo : j["outcomes"]) {
        if (!jo.is_object() || !jo.contains("prob") || !jo.contains("displacements"))
            throw validation_error("", "each outcome needs 'prob' and 'displacements'");
        Outcome o;
        const auto& jp = jo["prob"];
        if (jp.is_string()) {
            o.prob_exact = parse_rational_string(jp.get<std::string>());
            o.prob = o.prob_exact->get_d();
        } else if (jp.is_number_integer()) {
            o.prob_exact = mpq_class(static_cast<long>(jp.get<long long>()));
            o.prob = o.prob_exact->get_d();
        } else if (jp.is_number()) {
            o.prob = jp.get<double>();
        } else {
            throw validation_error("", "'prob' must be a number or a rational string");
        }
        if (!(o.prob > 0.0) || o.prob > 1.0 + kProbSumTolerance)
            throw validation_error("", "outcome probabilities must lie in (0, 1]");
        if (o.prob_exact && (*o.prob_exact <= 0 || *o.prob_exact > 1))
            throw validation_error("", "outcome probabilities must lie in (0, 1]");
        if (!jo["displacements"].is_array())
            throw validation_error("", "'displacements' must be an array of integers");
        for (const auto& jd : jo["displacements"]) {
            if (!jd.is_number_integer())
                throw validation_error("", "displacements must be integers");
            o.displacements.push_back(jd.get<long long>());
        }
        std::sort(o.displacements.begin(), o.displacements.end());
        model.outcomes.push_back(std::move(o));
    }

    double sum = 0.0;
    for (const auto& o : model.outcomes) sum += o.prob;
    if (std::fabs(sum - 1.0) > kProbSumTolerance)
        throw validation_error("", "outcome probabilities sum to " + std::to_string(sum) + ", not 1");

    if (j.contains("drift")) {
        if (!j["drift"].is_string() || j["drift"].get<std::string>() != "irrational")
            throw validation_error("", "'drift' accepts only the declaration \"irrational\"");
        model.drift = DriftClass::declared_irrational;
    }
    return model;
}

ModelSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("", "cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

std::string canonical_json(const ModelSpec& model) {
    std::ostringstream out;
    out << "{\"outcomes\":[";
    for (std::size_t i = 0; i < model.outcomes.size(); ++i) {
        const Outcome& o = model.outcomes[i];
        if (i) out << ',';
        out << "{\"prob\":";
        if (o.prob_exact) {
            out << '"' << o.prob_exact->get_str() << '"';
        } else {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", o.prob);
            out << buf;
        }
        out << ",\"displacements\":[";
        for (std::size_t d = 0; d < o.displacements.size(); ++d) {
            if (d) out << ',';
            out << o.displacements[d];
        }
        out << "]}";
    }
    out << ']';
    if (model.drift == DriftClass::declared_irrational) out << ",\"drift\":\"irrational\"";
    out << '}';
    return out.str();
}

std::uint64_t model_hash(const ModelSpec& model) {
    std::string s = canonical_json(model);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string model_hash_hex(const ModelSpec& model) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(model_hash(model)));
    return buf;
}

}  // namespace brw
