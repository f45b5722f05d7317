#include "floquet/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "floquet/blockenc.hpp"
#include "floquet/errors.hpp"
#include "floquet/fqpe.hpp"
#include "floquet/prep.hpp"
#include "floquet/spectral.hpp"

namespace floquet::cli {

namespace {

using nlohmann::json;

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Range {
    int lo = 0;
    int hi = 0;
};

Range parse_range(const std::string& s) {
    const auto c = s.find(':');
    try {
        if (c == std::string::npos) {
            const int v = std::stoi(s);
            return {v, v};
        }
        Range r{std::stoi(s.substr(0, c)), std::stoi(s.substr(c + 1))};
        if (r.hi < r.lo) throw ConfigError("range '" + s + "' is empty");
        return r;
    } catch (const std::logic_error&) {
        throw ConfigError("cannot parse range '" + s + "' (expected a:b)");
    }
}

// one or more config documents: a bare Hamiltonian or {"hamiltonian": obj|path, <flag>: value, ...}
struct Loaded {
    FourierHamiltonian h;
    json params = json::object();
};

Loaded load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path, std::string("invalid JSON: ") + e.what());
    }
    Loaded l;
    if (doc.is_object() && doc.contains("hamiltonian")) {
        const json& hj = doc["hamiltonian"];
        if (hj.is_string()) {
            const auto base = std::filesystem::path(path).parent_path();
            l.h = load_hamiltonian((base / hj.get<std::string>()).string());
        } else {
            l.h = parse_hamiltonian(hj);
        }
        for (auto it = doc.begin(); it != doc.end(); ++it)
            if (it.key() != "hamiltonian") l.params[it.key()] = it.value();
    } else {
        l.h = parse_hamiltonian(doc);
    }
    return l;
}

std::string scalar_text(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return num(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_array() || v.is_object()) return v.dump();
    throw ConfigError("config key '" + key + "' has an unsupported value");
}

CVector parse_psi(const std::string& s, long dim) {
    CVector psi = CVector::Zero(dim);
    if (s == "zero") {
        psi(0) = 1.0;
        return psi;
    }
    if (s == "plus") {
        psi.setConstant(1.0 / std::sqrt(double(dim)));
        return psi;
    }
    json j;
    try {
        j = json::parse(s);
    } catch (const json::parse_error&) {
        throw ConfigError("--psi expects zero, plus, or a JSON array");
    }
    if (!j.is_array() || static_cast<long>(j.size()) != dim)
        throw ConfigError("--psi must hold " + std::to_string(dim) + " amplitudes");
    for (long k = 0; k < dim; ++k) {
        const json& a = j[k];
        if (a.is_number()) psi(k) = a.get<double>();
        else if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number())
            psi(k) = cplx(a[0].get<double>(), a[1].get<double>());
        else throw ConfigError("--psi amplitude " + std::to_string(k) + " must be a number or [re, im]");
    }
    if (std::abs(psi.norm() - 1.0) > 1e-8) throw ConfigError("--psi is not normalized");
    return psi;
}

class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError("cannot write " + path);
            out_ = &file_;
        }
    }
    std::ostream& os() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

const char* kCheckHeader = "model_id,check_id,L,measured,bound,pass\n";

void write_rows(std::ostream& os, const std::vector<CheckRow>& rows) {
    os << kCheckHeader;
    for (const auto& r : rows)
        os << r.model_id << ',' << r.check_id << ',' << r.L << ',' << num(r.measured) << ',' << num(r.bound) << ','
           << (r.pass ? "true" : "false") << '\n';
}

int report_failures(const std::vector<CheckRow>& rows, std::ostream& err) {
    int bad = 0;
    for (const auto& r : rows)
        if (!r.pass) {
            err << "FAIL " << r.model_id << ' ' << r.check_id << " L=" << r.L << " measured=" << num(r.measured)
                << " bound=" << num(r.bound) << '\n';
            ++bad;
        }
    return bad ? 1 : 0;
}

struct Options {
    std::vector<std::string> configs;
    std::string out;
    int L = 8;
    std::string method = "all";
    long steps = 100000;
    std::string checks = "all";
    std::string L_sweep = "4:12";
    std::string variant = "truncated";
    int m = 0;
    double alpha_tilde = 0.0;
    std::string mode = "sambe";
    double eps = 1e-3;
    double delta = 1e-3;
    double nu = 0.0;
    double t = 0.0;
    std::string psi = "plus";
    int shots = 0;
    std::uint64_t seed = 1;
    bool states = false;
    double eps_n = 0.0;
    double Delta = 0.1;
    double gamma = 1.0;
    std::string target = "physical";
    std::string formula = "all";
    double alphaT = 1.0;
    int N = 1;
    std::string eps_sweep;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

// flags that take the given value from the config when not set on the command line
struct Bound {
    std::string key;
    CLI::Option* opt;
};

struct Parser {
    CLI::App app{"Floquet quasienergy toolkit"};
    Options o;
    std::map<std::string, std::vector<Bound>> keys;  // subcommand -> config-settable flags
    std::map<std::string, CLI::App*> subs;

    CLI::App* sub(const std::string& name, const std::string& help) {
        CLI::App* s = app.add_subcommand(name, help);
        subs[name] = s;
        return s;
    }
    template <class T>
    void flag(const std::string& cmd, const std::string& name, T& v, const std::string& help) {
        CLI::Option* opt = subs[cmd]->add_option("--" + name, v, help)->capture_default_str();
        std::string key = name;
        std::replace(key.begin(), key.end(), '-', '_');
        keys[cmd].push_back({key, opt});
    }

    Parser() {
        app.require_subcommand(1);
        for (auto [n, h] : std::vector<std::pair<std::string, std::string>>{
                 {"spectrum", "quasienergies per method and pairwise distances (CSV)"},
                 {"verify", "bound checks over an L sweep (CSV)"},
                 {"tails", "Fourier-component tails against the tail bounds (CSV)"},
                 {"blockenc", "build and verify a block encoding (JSON)"},
                 {"fqpe", "Floquet phase estimation outcome (JSON)"},
                 {"prepare", "Floquet eigenstate preparation (JSON)"},
                 {"cost", "asymptotic query-cost shapes (CSV)"},
                 {"sweep", "verify over several configs and cutoffs in parallel (CSV)"}}) {
            CLI::App* s = sub(n, h);
            s->add_option("--out", o.out, "output file (default stdout)");
            if (n != "cost") {
                if (n == "sweep") s->add_option("--config", o.configs, "model or experiment JSON")->required();
                else s->add_option("--config", o.configs, "model or experiment JSON")->required()->expected(1);
            }
        }
        flag("spectrum", "L", o.L, "cutoff");
        flag("spectrum", "method", o.method, "obc|pbc|discretized|sambe_op|all");
        flag("spectrum", "steps", o.steps, "time steps of the discretized propagator");

        for (const char* c : {"verify", "sweep"}) {
            flag(c, "checks", o.checks, "comma list of checks or all");
            flag(c, "L-sweep", o.L_sweep, "cutoff range a:b");
            flag(c, "steps", o.steps, "oracle time steps");
        }
        flag("sweep", "threads", o.threads, "worker threads");

        flag("tails", "L", o.L, "cutoff");
        flag("tails", "variant", o.variant, "exact|truncated|expdecay");

        flag("blockenc", "L", o.L, "cutoff; 0 encodes a single component");
        flag("blockenc", "m", o.m, "component index when L = 0");
        flag("blockenc", "alpha-tilde", o.alpha_tilde, "normalization (default: the minimal one)");

        flag("fqpe", "mode", o.mode, "physical|sambe");
        flag("fqpe", "eps", o.eps, "accuracy in units of w");
        flag("fqpe", "delta", o.delta, "failure probability");
        flag("fqpe", "nu", o.nu, "rounding promise (0: no-promise mode)");
        flag("fqpe", "t", o.t, "time of the physical output state");
        flag("fqpe", "L", o.L, "Sambe cutoff (0: from eps and delta)");
        flag("fqpe", "psi", o.psi, "zero|plus|JSON amplitudes");
        flag("fqpe", "shots", o.shots, "sampled outcomes");
        flag("fqpe", "seed", o.seed, "sampling seed");
        subs["fqpe"]->add_flag("--states", o.states, "include post-measurement states");

        flag("prepare", "eps-n", o.eps_n, "target quasienergy in units of w");
        flag("prepare", "Delta", o.Delta, "gap in units of w");
        flag("prepare", "gamma", o.gamma, "overlap lower bound");
        flag("prepare", "delta", o.delta, "state error");
        flag("prepare", "target", o.target, "physical|sambe");
        flag("prepare", "t", o.t, "time of the physical target");
        flag("prepare", "L", o.L, "Sambe cutoff (0: from the accuracy)");
        flag("prepare", "psi", o.psi, "zero|plus|JSON amplitudes");
        flag("prepare", "steps", o.steps, "oracle time steps");

        flag("cost", "formula", o.formula, "formula name or all");
        flag("cost", "alphaT", o.alphaT, "alpha T");
        flag("cost", "N", o.N, "qubits");
        flag("cost", "eps", o.eps, "accuracy");
        flag("cost", "delta", o.delta, "failure probability");
        flag("cost", "nu", o.nu, "rounding promise");
        flag("cost", "gamma", o.gamma, "overlap");
        flag("cost", "Delta", o.Delta, "gap");
        flag("cost", "eps-sweep", o.eps_sweep, "lo:hi:n log-spaced eps values");
    }
};

std::vector<CheckRow> verify_one(const FourierHamiltonian& h, Range r, const BoundTargets& tg, long steps) {
    const Oracle orc = make_oracle(h, steps);
    std::vector<CheckRow> rows;
    for (int L = r.lo; L <= r.hi; ++L) {
        auto part = verify_bounds(h, L, tg, &orc);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

int cmd_spectrum(const Options& o, const FourierHamiltonian& h, std::ostream& os) {
    const std::vector<std::string> all{"obc", "pbc", "discretized", "sambe_op"};
    std::vector<std::string> methods;
    if (o.method == "all") methods = all;
    else if (std::find(all.begin(), all.end(), o.method) != all.end()) methods = {o.method};
    else throw ConfigError("unknown method '" + o.method + "'");
    if (o.L < 1) throw DomainError("L must be >= 1");
    std::vector<std::vector<double>> values;
    for (const auto& m : methods) {
        std::vector<double> v;
        if (m == "obc" || m == "pbc") {
            const auto qs = diagonalize_sambe(build_floquet(h, o.L, m == "obc" ? Boundary::Obc : Boundary::Pbc));
            v = qs.central_values();
        } else {
            const CMatrix u = m == "discretized" ? floquet_operator(h, method::Discretized{o.steps})
                                                 : polar_unitary(floquet_operator(h, method::Sambe{o.L}));
            for (const auto& e : quasienergies_from_unitary(u, h.omega(), h.period()).entries) v.push_back(e.value);
        }
        values.push_back(v);
    }
    os << "model_id,record,method,other,L,index,value_over_omega\n";
    for (std::size_t a = 0; a < methods.size(); ++a)
        for (std::size_t k = 0; k < values[a].size(); ++k)
            os << h.name() << ",quasienergy," << methods[a] << ",," << o.L << ',' << k << ','
               << num(values[a][k] / h.omega()) << '\n';
    for (std::size_t a = 0; a < methods.size(); ++a)
        for (std::size_t b = a + 1; b < methods.size(); ++b) {
            const Matching mt = match_mod_omega(values[a], values[b], h.omega());
            os << h.name() << ",max_distance," << methods[a] << ',' << methods[b] << ',' << o.L << ",," << num(mt.max)
               << '\n';
        }
    return 0;
}

int cmd_tails(const Options& o, const FourierHamiltonian& h, std::ostream& os, std::ostream& err) {
    if (o.L < 1) throw DomainError("L must be >= 1");
    const SambeOperator op = build_floquet(h, o.L, Boundary::Obc);
    const QuasiSpectrum qs = diagonalize_sambe(op);
    std::vector<FloquetEigenpair> pairs;
    double emax = 0.0;
    for (int i : qs.central_indices()) {
        pairs.push_back(extract_eigenpair(qs.entries[i], op.window, h.dim()));
        emax = std::max(emax, std::abs(qs.entries[i].value) / h.omega());
    }
    std::vector<CheckRow> rows;
    for (int l = op.window.lo(); l <= op.window.hi(); ++l) {
        double meas = 0.0;
        for (const auto& p : pairs) meas = std::max(meas, p.component(l).norm());
        double bound;
        if (o.variant == "exact") bound = tail_bound_exact(l, h.M(), h.alphaT());
        else if (o.variant == "truncated") bound = tail_bound_truncated(l, h.M(), h.alphaT(), emax);
        else if (o.variant == "expdecay") {
            if (h.mode() != DriveMode::Decaying) throw ConfigError("expdecay needs a decaying-mode model");
            bound = tail_bound_expdecay(l, h.zeta(), h.alphaT());
        } else throw ConfigError("unknown variant '" + o.variant + "'");
        rows.push_back({h.name(), "tail_" + o.variant + "_l=" + std::to_string(l), o.L, meas, bound,
                        meas <= bound + kNumericFloor});
    }
    write_rows(os, rows);
    return report_failures(rows, err);
}

int cmd_blockenc(const Options& o, const FourierHamiltonian& h, std::ostream& os) {
    json j;
    if (o.L == 0) {
        const double a = o.alpha_tilde > 0 ? o.alpha_tilde : h.alpha_of(o.m);
        const BlockEncoding be = build_component_encoding(h, o.m, a);
        const EncodingCheck c = verify_encoding(be, h.component(o.m));
        j = {{"object", "H_" + std::to_string(o.m)}, {"alpha", be.alpha}, {"ancilla_dim", be.ancilla_dim},
             {"target_dim", be.target_dim}, {"error", c.error}, {"unitarity_defect", c.unitarity_defect}};
    } else {
        if (o.L < 1) throw DomainError("L must be >= 0");
        const SambeOperator op = build_floquet(h, o.L, Boundary::Pbc);
        const double a = o.alpha_tilde > 0 ? o.alpha_tilde : op.alpha_F;
        const BlockEncoding be = build_floquet_encoding(h, o.L, a);
        const EncodingCheck c = verify_encoding(be, op.matrix);
        j = {{"object", "H_F,pbc^L"}, {"L", o.L}, {"alpha", be.alpha}, {"alpha_F", op.alpha_F},
             {"queries", be.queries}, {"ancilla_dim", be.ancilla_dim}, {"target_dim", be.target_dim},
             {"error", c.error}, {"unitarity_defect", c.unitarity_defect},
             {"normalization_bits", normalization_bits(op.alpha_F, h.omega())}};
    }
    os << j.dump(2) << '\n';
    return 0;
}

int cmd_fqpe(const Options& o, const FourierHamiltonian& h, std::ostream& os) {
    const CVector psi = parse_psi(o.psi, h.dim());
    std::optional<double> nu;
    if (o.nu > 0.0) nu = o.nu;
    QpeOutcome out;
    if (o.mode == "physical") {
        out = fqpe_physical(h, psi, {o.eps, o.delta, nu, o.t});
    } else if (o.mode == "sambe") {
        SambeQpeOptions so;
        so.eps = o.eps;
        so.delta = o.delta;
        so.nu = nu;
        if (o.L > 0) so.L = o.L;
        out = fqpe_sambe(h, psi, so);
    } else {
        throw ConfigError("unknown mode '" + o.mode + "'");
    }
    json j = to_json(out, o.states);
    j["model_id"] = h.name();
    if (o.shots > 0) {
        const auto s = sample_outcomes(out, o.shots, o.seed);
        j["samples"] = s;
        j["seed"] = o.seed;
    }
    os << j.dump(2) << '\n';
    return 0;
}

int cmd_prepare(const Options& o, const FourierHamiltonian& h, std::ostream& os) {
    const CVector psi = parse_psi(o.psi, h.dim());
    PrepSpec s;
    s.eps_n = o.eps_n * h.omega();
    s.Delta = o.Delta;
    s.gamma = o.gamma;
    s.delta = o.delta;
    s.t = o.t;
    s.oracle_steps = o.steps;
    if (o.target == "physical") s.target = TargetKind::Physical;
    else if (o.target == "sambe") s.target = TargetKind::Sambe;
    else throw ConfigError("unknown target '" + o.target + "'");
    if (o.L > 0) s.L = o.L;
    const PrepResult r = prepare_eigenstate(h, psi, s);
    json j = to_json(r);
    j["model_id"] = h.name();
    os << j.dump(2) << '\n';
    return 0;
}

int cmd_cost(const Options& o, std::ostream& os) {
    std::vector<CostKind> kinds;
    if (o.formula == "all")
        kinds = {CostKind::Thm3, CostKind::Thm4, CostKind::StandardExp, CostKind::StandardBlock,
                 CostKind::PrepTimeIndep, CostKind::PrepPhysical, CostKind::PrepSambe};
    else kinds = {parse_cost_kind(o.formula)};
    std::vector<double> epss{o.eps};
    if (!o.eps_sweep.empty()) {
        std::stringstream ss(o.eps_sweep);
        std::string a, b, c;
        std::getline(ss, a, ':');
        std::getline(ss, b, ':');
        std::getline(ss, c, ':');
        double lo, hi;
        int n;
        try {
            lo = std::stod(a);
            hi = std::stod(b);
            n = std::stoi(c);
        } catch (const std::logic_error&) {
            throw ConfigError("--eps-sweep expects lo:hi:n");
        }
        if (!(lo > 0) || !(hi >= lo) || n < 1) throw ConfigError("--eps-sweep expects 0 < lo <= hi and n >= 1");
        epss.clear();
        for (int i = 0; i < n; ++i)
            epss.push_back(n == 1 ? lo : lo * std::pow(hi / lo, double(i) / (n - 1)));
    }
    const double nu = o.nu > 0 ? o.nu : 1.0;
    os << "formula,alphaT,N,eps,delta,nu,gamma,Delta,queries,state_prep_queries,ancilla,label\n";
    for (CostKind k : kinds)
        for (double e : epss) {
            CostParams p{o.alphaT, o.N, e, o.delta, nu, o.gamma, o.Delta};
            const CostReport r = cost_formulas(p, k);
            os << to_string(k) << ',' << num(p.alphaT) << ',' << p.N << ',' << num(p.eps) << ',' << num(p.delta)
               << ',' << num(p.nu) << ',' << num(p.gamma) << ',' << num(p.Delta) << ',' << num(r.queries) << ','
               << num(r.state_prep_queries) << ',' << num(r.ancilla) << ',' << r.label << '\n';
        }
    return 0;
}

int cmd_sweep(const Options& o, std::ostream& os, std::ostream& err) {
    const Range r = parse_range(o.L_sweep);
    const BoundTargets tg = BoundTargets::parse(o.checks);
    std::vector<Loaded> models;
    for (const auto& c : o.configs) models.push_back(load_config(c));
    std::vector<Oracle> oracles;
    for (const auto& m : models) oracles.push_back(make_oracle(m.h, o.steps));

    struct Job {
        std::size_t model;
        int L;
        std::vector<CheckRow> rows;
        std::string error;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < models.size(); ++i)
        for (int L = r.lo; L <= r.hi; ++L) jobs.push_back({i, L, {}, {}});
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
            try {
                jobs[k].rows = verify_bounds(models[jobs[k].model].h, jobs[k].L, tg, &oracles[jobs[k].model]);
            } catch (const std::exception& e) {
                jobs[k].error = e.what();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(o.threads, static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::sort(jobs.begin(), jobs.end(), [&](const Job& a, const Job& b) {
        const auto& na = models[a.model].h.name();
        const auto& nb = models[b.model].h.name();
        return na != nb ? na < nb : (a.model != b.model ? a.model < b.model : a.L < b.L);
    });
    std::vector<CheckRow> rows;
    for (const auto& j : jobs) {
        if (!j.error.empty()) throw Error("sweep job " + models[j.model].h.name() + " L=" + std::to_string(j.L) + ": " + j.error);
        rows.insert(rows.end(), j.rows.begin(), j.rows.end());
    }
    write_rows(os, rows);
    return report_failures(rows, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        auto parse = [&](Parser& p, std::vector<std::string> a) {
            std::reverse(a.begin(), a.end());
            p.app.parse(a);
        };
        auto first = std::make_unique<Parser>();
        parse(*first, args);
        std::string cmd;
        for (auto& [name, s] : first->subs)
            if (s->parsed()) cmd = name;

        std::unique_ptr<Parser> p = std::move(first);
        std::optional<Loaded> model;
        if (cmd != "cost" && cmd != "sweep") {
            model = load_config(p->o.configs.at(0));
            if (!model->params.empty()) {
                // config values fill flags not given on the command line
                std::vector<std::string> extra = args;
                for (auto it = model->params.begin(); it != model->params.end(); ++it) {
                    const auto& ks = p->keys[cmd];
                    auto k = std::find_if(ks.begin(), ks.end(), [&](const Bound& b) { return b.key == it.key(); });
                    if (k == ks.end()) throw ConfigError("config key '" + it.key() + "' is not valid for " + cmd);
                    if (k->opt->count() > 0) continue;
                    extra.push_back(k->opt->get_name());
                    extra.push_back(scalar_text(it.value(), it.key()));
                }
                p = std::make_unique<Parser>();
                parse(*p, extra);
            }
        }
        const Options& o = p->o;
        Sink sink(o.out, out);
        std::ostream& os = sink.os();
        if (cmd == "spectrum") return cmd_spectrum(o, model->h, os);
        if (cmd == "verify") {
            const auto rows = verify_one(model->h, parse_range(o.L_sweep), BoundTargets::parse(o.checks), o.steps);
            write_rows(os, rows);
            return report_failures(rows, err);
        }
        if (cmd == "tails") return cmd_tails(o, model->h, os, err);
        if (cmd == "blockenc") return cmd_blockenc(o, model->h, os);
        if (cmd == "fqpe") return cmd_fqpe(o, model->h, os);
        if (cmd == "prepare") return cmd_prepare(o, model->h, os);
        if (cmd == "cost") return cmd_cost(o, os);
        if (cmd == "sweep") return cmd_sweep(o, os, err);
        throw ConfigError("no subcommand");
    } catch (const CLI::CallForHelp&) {
        Parser p;
        const auto s = args.empty() ? p.subs.end() : p.subs.find(args.front());
        out << (s == p.subs.end() ? p.app.help() : s->second->help());
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace floquet::cli
