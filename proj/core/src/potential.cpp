#include "zsb/potential.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "zsb/errors.hpp"

namespace zsb {

namespace {

const double COEFF_DROP = 0.0; // keep exactly what the caller supplies

void prune(Potential::CoeffMap& m) {
    for (auto it = m.begin(); it != m.end();) {
        if (std::abs(it->second) <= COEFF_DROP)
            it = m.erase(it);
        else
            ++it;
    }
}

} // namespace

Potential::Potential(CoeffMap minus, CoeffMap plus)
    : minus_(std::move(minus)), plus_(std::move(plus)) {
    prune(minus_);
    prune(plus_);
}

Potential Potential::real_u(const CoeffMap& u_coeffs) {
    return Potential(u_coeffs, u_coeffs);
}

Potential Potential::constant(double a) {
    if (a == 0.0) return Potential();
    CoeffMap m{{0, cx(a, 0)}};
    return Potential(m, m);
}

Potential Potential::cosine(double amp, int k) {
    CoeffMap m;
    m[k] = cx(0.5 * amp, 0);
    m[-k] = cx(0.5 * amp, 0);
    return Potential(m, m);
}

cx Potential::coeff_minus(int n) const {
    auto it = minus_.find(n);
    return it == minus_.end() ? cx(0) : it->second;
}

cx Potential::coeff_plus(int n) const {
    auto it = plus_.find(n);
    return it == plus_.end() ? cx(0) : it->second;
}

int Potential::nmodes() const {
    int k = 0;
    for (const auto& [n, c] : minus_) k = std::max(k, std::abs(n));
    for (const auto& [n, c] : plus_) k = std::max(k, std::abs(n));
    return k;
}

bool Potential::is_real_type(double tol) const {
    double scale = 0;
    for (const auto& [n, c] : minus_) scale = std::max(scale, std::abs(c));
    for (const auto& [n, c] : plus_) scale = std::max(scale, std::abs(c));
    double bound = tol * (1.0 + scale);
    for (const auto& [n, c] : minus_)
        if (std::abs(coeff_plus(n) - std::conj(c)) > bound) return false;
    for (const auto& [n, c] : plus_)
        if (std::abs(coeff_minus(n) - std::conj(c)) > bound) return false;
    return true;
}

bool Potential::is_er(double tol) const {
    if (!is_real_type(tol)) return false;
    double scale = 0;
    for (const auto& [n, c] : minus_) scale = std::max(scale, std::abs(c));
    double bound = tol * (1.0 + scale);
    for (const auto& [n, c] : minus_)
        if (std::abs(coeff_plus(n) - c) > bound) return false;
    for (const auto& [n, c] : plus_)
        if (std::abs(coeff_minus(n) - c) > bound) return false;
    return true;
}

namespace {

cx eval_series(const Potential::CoeffMap& m, double x) {
    cx sum = 0;
    for (const auto& [n, c] : m) {
        double arg = 2.0 * PI * n * x;
        sum += c * cx(std::cos(arg), std::sin(arg));
    }
    return sum;
}

} // namespace

cx Potential::eval_minus(double x) const { return eval_series(minus_, x); }
cx Potential::eval_plus(double x) const { return eval_series(plus_, x); }

std::vector<cx> Potential::dense_minus(int K) const {
    std::vector<cx> v(2 * K + 1, cx(0));
    for (const auto& [n, c] : minus_)
        if (std::abs(n) <= K) v[n + K] = c;
    return v;
}

std::vector<cx> Potential::dense_plus(int K) const {
    std::vector<cx> v(2 * K + 1, cx(0));
    for (const auto& [n, c] : plus_)
        if (std::abs(n) <= K) v[n + K] = c;
    return v;
}

double fl_norm(const Potential& phi, double p) {
    if (!(p >= 1.0)) throw DomainError("fl_norm: requires p >= 1");
    auto lp = [p](const Potential::CoeffMap& m) {
        double sum = 0;
        for (const auto& [n, c] : m) sum += std::pow(std::abs(c), p);
        return std::pow(sum, 1.0 / p);
    };
    return std::max(lp(phi.minus()), lp(phi.plus()));
}

namespace {

// Samples the four needed derivative combinations on a uniform grid that is
// fine enough for the quartic integrands (degree 4K trig polynomials), so
// the periodic trapezoid mean is exact up to roundoff.
struct GridData {
    std::vector<cx> pm, pp, dpm, dpp, d3pp;
    int G;
};

GridData sample_all(const Potential& phi) {
    const int K = phi.nmodes();
    int G = 64;
    while (G < 4 * K + 2) G *= 2;
    GridData g;
    g.G = G;
    g.pm.assign(G, 0);
    g.pp.assign(G, 0);
    g.dpm.assign(G, 0);
    g.dpp.assign(G, 0);
    g.d3pp.assign(G, 0);
    for (int j = 0; j < G; ++j) {
        double x = double(j) / G;
        for (const auto& [n, c] : phi.minus()) {
            double arg = 2.0 * PI * n * x;
            cx e(cx(std::cos(arg), std::sin(arg)));
            cx ik = cx(0, 2.0 * PI * n);
            g.pm[j] += c * e;
            g.dpm[j] += c * ik * e;
        }
        for (const auto& [n, c] : phi.plus()) {
            double arg = 2.0 * PI * n * x;
            cx e(cx(std::cos(arg), std::sin(arg)));
            cx ik = cx(0, 2.0 * PI * n);
            g.pp[j] += c * e;
            g.dpp[j] += c * ik * e;
            g.d3pp[j] += c * ik * ik * ik * e;
        }
    }
    return g;
}

} // namespace

HamiltonianValues hamiltonians(const Potential& phi) {
    if (phi.empty()) return {0, 0, 0, 0};
    GridData g = sample_all(phi);
    cx h1 = 0, h2 = 0, h3 = 0, h4 = 0;
    for (int j = 0; j < g.G; ++j) {
        h1 += g.pm[j] * g.pp[j];
        h2 += g.pp[j] * g.dpm[j] - g.pm[j] * g.dpp[j];
        cx sq = g.pm[j] * g.pm[j] * g.pp[j];
        h3 += g.dpm[j] * g.dpp[j] + sq * g.pp[j];
        h4 += g.pm[j] * g.d3pp[j] - 3.0 * sq * g.dpp[j];
    }
    double inv = 1.0 / g.G;
    return {h1 * inv, cx(0, 0.5) * h2 * inv, h3 * inv, cx(0, 1) * h4 * inv};
}

// ---------------------------------------------------------------------------
// JSON schema:
//   { "kind": "real_u", "coeffs": [[n, re, im], ...] }          u with phi=(u,u)
//   { "kind": "pair", "coeffs_minus": [...], "coeffs_plus": [...] }
// The writer emits sorted modes and uses "real_u" whenever phi+ == phi-.
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json coeffs_to_json(const Potential::CoeffMap& m) {
    json arr = json::array();
    for (const auto& [n, c] : m) // std::map iterates in sorted mode order
        arr.push_back({n, c.real(), c.imag()});
    return arr;
}

Potential::CoeffMap coeffs_from_json(const json& arr, const char* what) {
    if (!arr.is_array())
        throw ConfigError(std::string("potential JSON: ") + what + " must be an array");
    Potential::CoeffMap m;
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 3)
            throw ConfigError(std::string("potential JSON: ") + what +
                              " entries must be [n, re, im]");
        int n = e[0].get<int>();
        cx c(e[1].get<double>(), e[2].get<double>());
        if (m.count(n))
            throw ConfigError(std::string("potential JSON: duplicate mode in ") + what);
        if (std::abs(c) > 0) m[n] = c;
    }
    return m;
}

} // namespace

std::string potential_to_json(const Potential& phi) {
    json j;
    bool same = true;
    for (const auto& [n, c] : phi.minus())
        if (std::abs(phi.coeff_plus(n) - c) != 0.0) same = false;
    for (const auto& [n, c] : phi.plus())
        if (std::abs(phi.coeff_minus(n) - c) != 0.0) same = false;
    if (same) {
        j["kind"] = "real_u";
        j["coeffs"] = coeffs_to_json(phi.minus());
    } else {
        j["kind"] = "pair";
        j["coeffs_minus"] = coeffs_to_json(phi.minus());
        j["coeffs_plus"] = coeffs_to_json(phi.plus());
    }
    return j.dump(2);
}

Potential potential_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("potential JSON parse error: ") + e.what());
    }
    std::string kind = j.value("kind", "");
    if (kind == "real_u") {
        auto u = coeffs_from_json(j.at("coeffs"), "coeffs");
        return Potential::real_u(u);
    }
    if (kind == "pair") {
        auto mm = coeffs_from_json(j.at("coeffs_minus"), "coeffs_minus");
        auto pp = coeffs_from_json(j.at("coeffs_plus"), "coeffs_plus");
        return Potential(std::move(mm), std::move(pp));
    }
    throw ConfigError("potential JSON: kind must be \"real_u\" or \"pair\"");
}

Potential load_potential(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open potential file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return potential_from_json(ss.str());
}

void save_potential(const Potential& phi, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write potential file: " + path);
    out << potential_to_json(phi) << "\n";
}

} // namespace zsb
