#include "causticfd/stencil.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace causticfd {

namespace {

struct Term {
    double Stencil::*member;
    Level level;
    int offset;
    const char* key;
};

constexpr std::array<Term, 9> terms = {{
    {&Stencil::alpha, Level::next, 0, "alpha"},
    {&Stencil::beta, Level::current, 0, "beta"},
    {&Stencil::gamma, Level::previous, 0, "gamma"},
    {&Stencil::delta, Level::current, +1, "delta"},
    {&Stencil::upsilon, Level::previous, +1, "upsilon"},
    {&Stencil::epsilon, Level::current, -1, "epsilon"},
    {&Stencil::zeta, Level::next, +1, "zeta"},
    {&Stencil::eta, Level::previous, -1, "eta"},
    {&Stencil::theta, Level::next, -1, "theta"},
}};

int level_shift(Level level) { return static_cast<int>(level) - 1; }

}  // namespace

double Stencil::coefficient(Level level, int offset) const {
    for (const auto& t : terms) {
        if (t.level == level && t.offset == offset) return this->*t.member;
    }
    throw std::out_of_range("stencil offset must be -1, 0 or +1");
}

void Stencil::validate() const {
    for (const auto& t : terms) {
        if (!std::isfinite(this->*t.member)) {
            throw std::invalid_argument(std::string("stencil coefficient '") + t.key + "' is not finite");
        }
    }
    if (!advances()) throw std::invalid_argument("stencil '" + name + "' has no level n+1 coefficient");
}

std::string_view to_string(SchemeId id) {
    switch (id) {
        case SchemeId::leapfrog: return "leapfrog";
        case SchemeId::lax: return "lax";
        case SchemeId::lax_wendroff: return "lax_wendroff";
        case SchemeId::crank_nicolson_table1: return "crank_nicolson_table1";
        case SchemeId::crank_nicolson_standard: return "crank_nicolson_standard";
    }
    return "unknown";
}

SchemeId parse_scheme(std::string_view name) {
    for (auto id : all_schemes) {
        if (to_string(id) == name) return id;
    }
    throw std::invalid_argument("unknown scheme identifier '" + std::string(name) + "'");
}

Stencil build_scheme(SchemeId id, const AdvectionProblem& prob) {
    prob.validate();
    const double c = prob.c;
    const double h = prob.h;
    const double tau = prob.tau;
    const double sigma = prob.sigma();

    Stencil st;
    st.name = std::string(to_string(id));
    switch (id) {
        case SchemeId::leapfrog:
            st.alpha = 1.0 / (2.0 * tau);
            st.gamma = -1.0 / (2.0 * tau);
            st.delta = c / (2.0 * h);
            st.epsilon = -c / (2.0 * h);
            break;
        case SchemeId::lax:
            st.alpha = 1.0 / tau;
            st.delta = -1.0 / (2.0 * tau) + c / (2.0 * h);
            st.epsilon = -1.0 / (2.0 * tau) - c / (2.0 * h);
            break;
        case SchemeId::lax_wendroff:
            st.alpha = 1.0 / tau;
            st.beta = -1.0 / tau + c * c * tau / (h * h);
            st.delta = (1.0 - sigma) * c / (2.0 * h);
            st.epsilon = -(1.0 + sigma) * c / (2.0 * h);
            break;
        case SchemeId::crank_nicolson_table1:
            // Transcribed as tabulated; fails the u = 1 consistency test.
            st.alpha = 2.0 / tau;
            st.beta = 2.0 / tau;
            st.delta = -c / (2.0 * h);
            st.epsilon = c / (2.0 * h);
            st.zeta = c / (2.0 * h);
            st.theta = -c / (2.0 * h);
            break;
        case SchemeId::crank_nicolson_standard:
            // 2/tau (u^{n+1} - u^n) + c/(2h) [(u_{j+1} - u_{j-1})^{n+1} + (u_{j+1} - u_{j-1})^n]
            st.alpha = 2.0 / tau;
            st.beta = -2.0 / tau;
            st.delta = c / (2.0 * h);
            st.epsilon = -c / (2.0 * h);
            st.zeta = c / (2.0 * h);
            st.theta = -c / (2.0 * h);
            break;
    }
    return st;
}

Stencil build_scheme(std::string_view id, const AdvectionProblem& prob) {
    return build_scheme(parse_scheme(id), prob);
}

ConsistencyReport check_consistency(const Stencil& st, const AdvectionProblem& prob) {
    ConsistencyReport r;
    for (const auto& t : terms) {
        const double a = st.*t.member;
        const double s = level_shift(t.level);
        r.constant_residual += a;
        r.constant_scale += std::abs(a);
        r.linear_residual += a * (t.offset * prob.h - prob.c * s * prob.tau);
        r.linear_scale += std::abs(a) * (prob.h + std::abs(prob.c) * prob.tau);
    }
    r.constant_ok = std::abs(r.constant_residual) <= consistency_tolerance * r.constant_scale;
    r.linear_ok = std::abs(r.linear_residual) <= consistency_tolerance * r.linear_scale;
    return r;
}

Stencil parse_stencil_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("stencil document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("stencil document must be a JSON object");

    std::set<std::string> expected{"name"};
    for (const auto& t : terms) expected.insert(t.key);
    for (const auto& [key, value] : doc.items()) {
        if (!expected.contains(key)) throw std::invalid_argument("unexpected stencil key '" + key + "'");
    }
    for (const auto& key : expected) {
        if (!doc.contains(key)) throw std::invalid_argument("missing stencil key '" + key + "'");
    }

    Stencil st;
    if (!doc["name"].is_string()) throw std::invalid_argument("stencil key 'name' must be a string");
    st.name = doc["name"].get<std::string>();
    for (const auto& t : terms) {
        const auto& v = doc[t.key];
        if (!v.is_number()) throw std::invalid_argument(std::string("stencil key '") + t.key + "' must be a number");
        st.*t.member = v.get<double>();
    }
    st.validate();
    return st;
}

Stencil load_stencil_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open stencil file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_stencil_json(buf.str());
}

std::string stencil_to_json(const Stencil& st) {
    nlohmann::ordered_json doc;
    doc["name"] = st.name;
    for (const auto& t : terms) doc[t.key] = st.*t.member;
    return doc.dump(2);
}

}  // namespace causticfd
