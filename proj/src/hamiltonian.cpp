#include "floquet/hamiltonian.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "floquet/errors.hpp"

namespace floquet {

using nlohmann::json;

int decaying_cutoff(double alpha, double zeta) {
    if (!(alpha > 0.0)) return 0;
    const double v = zeta * std::log(alpha / kDecayEta);
    return v <= 0.0 ? 0 : static_cast<int>(std::ceil(v));
}

CMatrix FourierHamiltonian::component(int m) const {
    auto it = components_.find(m);
    if (it != components_.end()) return it->second;
    return CMatrix::Zero(dim(), dim());
}

double FourierHamiltonian::alpha_of(int m) const {
    auto it = alpha_m_.find(m);
    return it == alpha_m_.end() ? 0.0 : it->second;
}

void FourierHamiltonian::finalize(const std::map<int, double>& alpha_given) {
    if (n_qubits_ < 1 || n_qubits_ > 12) throw ValidationError("n_qubits must be in [1, 12]");
    if (!(period_ > 0.0) || !std::isfinite(period_)) throw ValidationError("period must be positive");
    omega_ = 2.0 * M_PI / period_;
    const long d = dim();
    for (auto& [m, hm] : components_) {
        if (hm.rows() != d || hm.cols() != d)
            throw ValidationError("H_" + std::to_string(m) + " has wrong dimension");
        if (!hm.allFinite()) throw ValidationError("H_" + std::to_string(m) + " has non-finite entries");
    }
    // H_{-m} = H_m^dag
    std::map<int, CMatrix> filled = components_;
    for (auto& [m, hm] : components_) {
        auto it = components_.find(-m);
        if (it == components_.end()) {
            filled[-m] = hm.adjoint();
            continue;
        }
        const double defect = (it->second - hm.adjoint()).cwiseAbs().maxCoeff();
        if (defect > hermitian_tol() * std::max(1.0, hm.norm()))
            throw ValidationError("hermiticity violated: H_" + std::to_string(-m) + " != H_" + std::to_string(m) +
                                  "^dag (defect " + std::to_string(defect) + ")");
    }
    components_ = std::move(filled);
    for (auto& [m, terms] : std::map<int, std::vector<PauliTerm>>(pauli_)) {
        if (pauli_.count(-m)) continue;
        std::vector<PauliTerm> conj;
        for (const auto& t : terms) conj.push_back({std::conj(t.coeff), t.pauli});
        pauli_[-m] = conj;
    }

    if (mode_ == DriveMode::Bounded) {
        if (M_ < 0 || M_ > 8) throw ValidationError("bounded mode requires 0 <= M <= 8");
        for (auto& [m, hm] : components_)
            if (std::abs(m) > M_) throw ValidationError("component m = " + std::to_string(m) + " exceeds M");
    } else {
        if (!(alpha_ > 0.0) || !(zeta_ > 0.0)) throw ValidationError("decaying mode requires alpha, zeta > 0");
        M_ = decaying_cutoff(alpha_, zeta_);
        for (auto it = components_.begin(); it != components_.end();) {
            if (std::abs(it->first) > M_) it = components_.erase(it);
            else ++it;
        }
        for (auto it = pauli_.begin(); it != pauli_.end();) {
            if (std::abs(it->first) > M_) it = pauli_.erase(it);
            else ++it;
        }
    }

    alpha_m_.clear();
    double amax = 0.0;
    for (auto& [m, hm] : components_) {
        const double nrm = operator_norm(hm);
        double am = nrm;
        if (mode_ == DriveMode::Decaying) {
            am = alpha_ * std::exp(-std::abs(m) / zeta_);
            if (nrm > am * (1.0 + 1e-12))
                throw ValidationError("decaying bound violated at m = " + std::to_string(m));
        } else {
            auto g = alpha_given.find(m);
            if (g == alpha_given.end()) g = alpha_given.find(-m);
            if (g != alpha_given.end()) {
                am = g->second;
                if (nrm > am * (1.0 + 1e-12) + 1e-15)
                    throw ValidationError("alpha_m below ||H_m|| at m = " + std::to_string(m));
            }
        }
        alpha_m_[m] = am;
        amax = std::max(amax, am);
    }
    if (mode_ == DriveMode::Bounded) alpha_ = amax;
}

FourierHamiltonian FourierHamiltonian::bounded(int n_qubits, double period, int M, std::map<int, CMatrix> components,
                                               std::map<int, double> alpha_m) {
    FourierHamiltonian h;
    h.n_qubits_ = n_qubits;
    h.period_ = period;
    h.mode_ = DriveMode::Bounded;
    h.M_ = M;
    h.components_ = std::move(components);
    h.finalize(alpha_m);
    return h;
}

FourierHamiltonian FourierHamiltonian::decaying(int n_qubits, double period, double alpha, double zeta,
                                                std::map<int, CMatrix> components) {
    FourierHamiltonian h;
    h.n_qubits_ = n_qubits;
    h.period_ = period;
    h.mode_ = DriveMode::Decaying;
    h.alpha_ = alpha;
    h.zeta_ = zeta;
    h.components_ = std::move(components);
    h.finalize({});
    return h;
}

FourierHamiltonian FourierHamiltonian::from_pauli(int n_qubits, double period, int M,
                                                  const std::map<int, std::vector<PauliTerm>>& terms,
                                                  std::map<int, double> alpha_m) {
    std::map<int, CMatrix> comps;
    const long d = 1L << n_qubits;
    for (auto& [m, list] : terms) {
        CMatrix hm = CMatrix::Zero(d, d);
        for (const auto& t : list) {
            if (static_cast<int>(t.pauli.size()) != n_qubits)
                throw ValidationError("Pauli string length differs from n_qubits at m = " + std::to_string(m));
            hm += t.coeff * pauli_string(t.pauli);
        }
        comps[m] = hm;
    }
    FourierHamiltonian h;
    h.n_qubits_ = n_qubits;
    h.period_ = period;
    h.mode_ = DriveMode::Bounded;
    h.M_ = M;
    h.components_ = std::move(comps);
    h.pauli_ = terms;
    h.finalize(alpha_m);
    return h;
}

namespace {

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ParseError(path + "." + it.key(), "unknown key");
}

const json& need(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) throw ParseError(path + "." + key, "missing");
    return obj.at(key);
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError(path, "expected number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ParseError(path, "expected integer");
    return v.get<int>();
}

cplx as_complex(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ParseError(path, "expected [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

FourierHamiltonian parse_hamiltonian(const json& cfg) {
    const std::string root = "$";
    if (!cfg.is_object()) throw ParseError(root, "expected object");
    reject_unknown(cfg, root, {"n_qubits", "period", "units", "mode", "components", "alpha_m", "name"});
    const int n = as_int(need(cfg, "n_qubits", root), root + ".n_qubits");
    const double period = as_number(need(cfg, "period", root), root + ".period");
    if (!(period > 0.0)) throw ParseError(root + ".period", "must be positive");
    std::string units = "omega";
    if (cfg.contains("units")) {
        if (!cfg["units"].is_string()) throw ParseError(root + ".units", "expected string");
        units = cfg["units"].get<std::string>();
        if (units != "omega" && units != "absolute") throw ParseError(root + ".units", "expected omega|absolute");
    }
    const double scale = units == "omega" ? 2.0 * M_PI / period : 1.0;

    const json& mode = need(cfg, "mode", root);
    if (!mode.is_object() || mode.size() != 1) throw ParseError(root + ".mode", "expected {bounded|decaying: {...}}");
    const bool decaying = mode.contains("decaying");
    if (!decaying && !mode.contains("bounded")) throw ParseError(root + ".mode", "expected bounded or decaying");

    const json& comps = need(cfg, "components", root);
    if (!comps.is_array()) throw ParseError(root + ".components", "expected array");
    const long d = (n >= 1 && n <= 12) ? (1L << n) : 0;
    if (d == 0) throw ParseError(root + ".n_qubits", "must be in [1, 12]");

    std::map<int, std::vector<PauliTerm>> terms;
    std::map<int, CMatrix> dense;
    int max_m = 0;
    for (size_t i = 0; i < comps.size(); ++i) {
        const std::string p = root + ".components[" + std::to_string(i) + "]";
        const json& c = comps[i];
        if (!c.is_object()) throw ParseError(p, "expected object");
        reject_unknown(c, p, {"m", "terms", "matrix"});
        const int m = as_int(need(c, "m", p), p + ".m");
        if (terms.count(m) || dense.count(m)) throw ParseError(p + ".m", "duplicate component");
        max_m = std::max(max_m, std::abs(m));
        if (c.contains("terms") == c.contains("matrix")) throw ParseError(p, "exactly one of terms|matrix required");
        if (c.contains("terms")) {
            const json& ts = c["terms"];
            if (!ts.is_array()) throw ParseError(p + ".terms", "expected array");
            std::vector<PauliTerm> list;
            for (size_t j = 0; j < ts.size(); ++j) {
                const std::string q = p + ".terms[" + std::to_string(j) + "]";
                reject_unknown(ts[j], q, {"coeff", "pauli"});
                PauliTerm t{as_complex(need(ts[j], "coeff", q), q + ".coeff") * scale, ""};
                const json& ps = need(ts[j], "pauli", q);
                if (!ps.is_string()) throw ParseError(q + ".pauli", "expected string");
                t.pauli = ps.get<std::string>();
                if (static_cast<int>(t.pauli.size()) != n) throw ParseError(q + ".pauli", "length differs from n_qubits");
                for (char ch : t.pauli)
                    if (std::string("IXYZ").find(ch) == std::string::npos)
                        throw ParseError(q + ".pauli", "letters must be I, X, Y, Z");
                list.push_back(t);
            }
            terms[m] = list;
        } else {
            const json& mat = c["matrix"];
            if (!mat.is_array() || static_cast<long>(mat.size()) != d) throw ParseError(p + ".matrix", "expected dim rows");
            CMatrix hm(d, d);
            for (long r = 0; r < d; ++r) {
                if (!mat[r].is_array() || static_cast<long>(mat[r].size()) != d)
                    throw ParseError(p + ".matrix[" + std::to_string(r) + "]", "expected dim entries");
                for (long k = 0; k < d; ++k)
                    hm(r, k) = as_complex(mat[r][k], p + ".matrix[" + std::to_string(r) + "][" + std::to_string(k) + "]") * scale;
            }
            dense[m] = hm;
        }
    }

    std::map<int, double> alpha_m;
    if (cfg.contains("alpha_m")) {
        const json& am = cfg["alpha_m"];
        if (!am.is_object()) throw ParseError(root + ".alpha_m", "expected object keyed by m");
        for (auto it = am.begin(); it != am.end(); ++it) {
            int m = 0;
            try {
                size_t pos = 0;
                m = std::stoi(it.key(), &pos);
                if (pos != it.key().size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ParseError(root + ".alpha_m." + it.key(), "key must be an integer");
            }
            alpha_m[m] = as_number(it.value(), root + ".alpha_m." + it.key()) * scale;
        }
    }

    const std::string name = cfg.contains("name") && cfg["name"].is_string() ? cfg["name"].get<std::string>() : "model";

    FourierHamiltonian h;
    if (decaying) {
        const json& dm = mode["decaying"];
        reject_unknown(dm, root + ".mode.decaying", {"alpha", "zeta"});
        const double alpha = as_number(need(dm, "alpha", root + ".mode.decaying"), root + ".mode.decaying.alpha") * scale;
        const double zeta = as_number(need(dm, "zeta", root + ".mode.decaying"), root + ".mode.decaying.zeta");
        if (!alpha_m.empty()) throw ParseError(root + ".alpha_m", "not allowed in decaying mode");
        std::map<int, CMatrix> all = dense;
        for (auto& [m, list] : terms) {
            CMatrix hm = CMatrix::Zero(d, d);
            for (auto& t : list) hm += t.coeff * pauli_string(t.pauli);
            all[m] = hm;
        }
        h = FourierHamiltonian::decaying(n, period, alpha, zeta, all);
    } else {
        const json& bm = mode["bounded"];
        if (!bm.is_object()) throw ParseError(root + ".mode.bounded", "expected object");
        reject_unknown(bm, root + ".mode.bounded", {"M"});
        const int M = bm.contains("M") ? as_int(bm["M"], root + ".mode.bounded.M") : max_m;
        if (dense.empty()) {
            h = FourierHamiltonian::from_pauli(n, period, M, terms, alpha_m);
        } else {
            std::map<int, CMatrix> all = dense;
            for (auto& [m, list] : terms) {
                CMatrix hm = CMatrix::Zero(d, d);
                for (auto& t : list) hm += t.coeff * pauli_string(t.pauli);
                all[m] = hm;
            }
            h = FourierHamiltonian::bounded(n, period, M, all, alpha_m);
        }
    }
    h.set_name(name);
    return h;
}

FourierHamiltonian parse_hamiltonian(const std::string& text) {
    json cfg;
    try {
        cfg = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_hamiltonian(cfg);
}

FourierHamiltonian load_hamiltonian(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_hamiltonian(ss.str());
}

CMatrix evaluate_at(const FourierHamiltonian& h, double t) {
    // reduce t modulo T so that H(t + T) reproduces H(t) to round-off
    double frac = std::fmod(t / h.period(), 1.0);
    if (frac < 0) frac += 1.0;
    const double phase = 2.0 * M_PI * frac;
    CMatrix out = CMatrix::Zero(h.dim(), h.dim());
    for (const auto& [m, hm] : h.components()) out += std::exp(cplx(0.0, -m * phase)) * hm;
    return 0.5 * (out + out.adjoint());
}

NormBound norm_bound(const FourierHamiltonian& h) {
    if (h.mode() == DriveMode::Bounded) return {(2.0 * h.M() + 1.0) * h.alpha(), false};
    return {h.alpha() * (2.0 / (1.0 - std::exp(-1.0 / h.zeta())) - 1.0), true};
}

}  // namespace floquet
