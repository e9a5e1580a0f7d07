#include "qthermo/config.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qthermo/errors.hpp"

namespace qthermo {

using nlohmann::json;

namespace {

// Walks every config field in one place; Reader and Writer share it.
class Reader {
   public:
    Reader(const json &j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError("'" + where() + "' must be an object");
    }

    template <class T>
    void field(const char *key, T &value) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        const json &v = j_.at(key);
        try {
            read(v, value);
        } catch (const json::exception &) {
            throw ConfigError("config key '" + join(key) + "' has the wrong type");
        }
    }

    template <class E>
    void choice(const char *key, E &value, const std::vector<std::pair<std::string, E>> &options) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        if (!j_.at(key).is_string()) throw ConfigError("config key '" + join(key) + "' must be a string");
        const auto s = j_.at(key).get<std::string>();
        for (const auto &[name, e] : options) {
            if (name == s) {
                value = e;
                return;
            }
        }
        throw ConfigError("config key '" + join(key) + "' has unknown value '" + s + "'");
    }

    void block(const char *key, const std::function<void(Reader &)> &body) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        Reader sub(j_.at(key), join(key));
        body(sub);
        sub.finish();
    }

    void finish() const {
        for (const auto &item : j_.items()) {
            if (!seen_.count(item.key())) throw ConfigError("unknown config key '" + join(item.key()) + "'");
        }
    }

   private:
    std::string where() const { return path_.empty() ? "<root>" : path_; }
    std::string join(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    static void read(const json &v, double &x) {
        if (!v.is_number()) throw json::type_error::create(302, "number", &v);
        x = v.get<double>();
    }
    static void read(const json &v, int &x) {
        if (!v.is_number_integer()) throw json::type_error::create(302, "integer", &v);
        x = v.get<int>();
    }
    static void read(const json &v, long &x) {
        if (!v.is_number_integer()) throw json::type_error::create(302, "integer", &v);
        x = v.get<long>();
    }
    static void read(const json &v, std::uint64_t &x) {
        if (!v.is_number_unsigned()) throw json::type_error::create(302, "unsigned integer", &v);
        x = v.get<std::uint64_t>();
    }
    static void read(const json &v, bool &x) {
        if (!v.is_boolean()) throw json::type_error::create(302, "boolean", &v);
        x = v.get<bool>();
    }
    static void read(const json &v, std::string &x) {
        if (!v.is_string()) throw json::type_error::create(302, "string", &v);
        x = v.get<std::string>();
    }
    static void read(const json &v, std::optional<double> &x) {
        if (v.is_null()) {
            x.reset();
            return;
        }
        double d = 0.0;
        read(v, d);
        x = d;
    }
    static void read(const json &v, std::vector<double> &x) {
        if (!v.is_array()) throw json::type_error::create(302, "array", &v);
        x.clear();
        for (const auto &e : v) {
            double d = 0.0;
            read(e, d);
            x.push_back(d);
        }
    }

    const json &j_;
    std::string path_;
    std::set<std::string> seen_;
};

class Writer {
   public:
    explicit Writer(json &j) : j_(j) {}

    template <class T>
    void field(const char *key, T &value) {
        j_[key] = value;
    }
    void field(const char *key, std::optional<double> &value) {
        j_[key] = value ? json(*value) : json(nullptr);
    }
    template <class E>
    void choice(const char *key, E &value, const std::vector<std::pair<std::string, E>> &options) {
        for (const auto &[name, e] : options) {
            if (e == value) j_[key] = name;
        }
    }
    void block(const char *key, const std::function<void(Writer &)> &body) {
        json sub = json::object();
        Writer w(sub);
        body(w);
        j_[key] = sub;
    }

   private:
    json &j_;
};

template <class V>
void visit(V &v, RunConfig &c) {
    auto &p = c.pipeline;
    v.field("seed", p.seed);
    v.field("noiseless", p.noiseless);
    v.field("output_dir", c.output_dir);
    v.block("system", [&](V &s) {
        s.field("max_dim", p.system.max_dim);
        s.block("transmon", [&](V &t) {
            auto &x = p.system.transmon;
            t.field("ec_ghz", x.ec_ghz);
            t.field("ej_max_ghz", x.ej_max_ghz);
            t.field("flux_quantum_fraction", x.flux_quantum_fraction);
            t.field("gate_charge", x.gate_charge);
            t.field("n_transmon_levels", x.n_transmon_levels);
            t.field("n_charge_states", x.n_charge_states);
        });
        s.block("resonator", [&](V &r) {
            auto &x = p.system.resonator;
            r.field("fr_ghz", x.fr_ghz);
            r.field("n_fock", x.n_fock);
            r.field("coupling_ghz", x.coupling_ghz);
            r.field("q_loaded", x.q_loaded);
        });
    });
    v.block("dissipation", [&](V &d) {
        auto &x = p.dissipation;
        d.field("gamma_eg_mhz", x.gamma_eg_mhz);
        d.field("gamma_fe_mhz", x.gamma_fe_mhz);
        d.field("gamma_df_mhz", x.gamma_df_mhz);
        d.field("kappa_mhz", x.kappa_mhz);
        d.field("bath_T_mK", x.bath_t_mk);
        d.field("dephasing_mhz", x.dephasing_mhz);
    });
    v.block("readout", [&](V &r) {
        auto &x = p.readout;
        r.field("probe_duration_ns", x.probe_duration_ns);
        r.field("if_mhz", x.if_mhz);
        r.field("sample_dt_ns", x.sample_dt_ns);
        r.field("window_start_ns", x.window_start_ns);
        r.field("window_end_ns", x.window_end_ns);
        r.field("noise_sigma", x.noise_sigma);
        r.field("n_averages", x.n_averages);
        r.field("probe_amplitude", x.probe_amplitude);
        r.field("probe_delay_ns", x.probe_delay_ns);
        r.field("distinguishability_threshold", x.distinguishability_threshold);
    });
    v.block("pulses", [&](V &b) {
        b.field("pi_ge_duration_ns", p.pulses.pi_ge_duration_ns);
        b.field("pi_ef_duration_ns", p.pulses.pi_ef_duration_ns);
        b.field("guard_ns", p.pulses.guard_ns);
        b.field("coarse_points", p.calibration.coarse_points);
        b.field("rounds", p.calibration.rounds);
        b.field("tune_frequency", p.calibration.tune_frequency);
        b.field("ode_rtol", p.calibration.ode.rtol);
        b.field("ode_atol", p.calibration.ode.atol);
    });
    v.block("protocol", [&](V &b) {
        auto &x = p.protocol;
        b.choice("quadratures", x.quadratures,
                 std::vector<std::pair<std::string, Quadratures>>{{"I", Quadratures::I}, {"IQ", Quadratures::IQ}});
        b.field("deming_delta", x.delta);
        b.field("n_bootstrap", x.n_bootstrap);
        b.field("clamp_out_of_range", x.clamp);
        b.field("max_ellipticity", x.max_ellipticity);
        b.field("outlier_sigmas", x.outlier_sigmas);
    });
    v.block("montecarlo", [&](V &b) {
        auto &m = c.montecarlo;
        b.field("n_experiments", m.spec.n_experiments);
        b.field("true_slope", m.spec.true_slope);
        b.field("x_span", m.spec.x_span);
        b.field("noise_sigma", m.spec.noise_sigma);
        b.field("n_points", m.spec.n_points);
        b.choice("abscissa", m.spec.abscissa,
                 std::vector<std::pair<std::string, Abscissa>>{{"sinusoidal", Abscissa::Sinusoidal},
                                                               {"uniform", Abscissa::Uniform}});
        b.choice("estimator", m.spec.estimator,
                 std::vector<std::pair<std::string, SlopeEstimator>>{{"deming", SlopeEstimator::Deming},
                                                                     {"ols", SlopeEstimator::OrdinaryLeastSquares}});
        b.field("delta", m.spec.delta);
        b.field("lambda_grid", m.lambda_grid);
        b.field("t_grid_mK", m.t_grid_mk);
        b.field("f_ge_ghz", m.f_ge_ghz);
        b.field("f_gf_ghz", m.f_gf_ghz);
        b.field("repeated_runs", m.repeated_runs);
    });
}

}  // namespace

void RunConfig::validate() const {
    try {
        pipeline.validate();
        montecarlo.spec.validate();
        LevelEnergies::from_transitions(montecarlo.f_ge_ghz, montecarlo.f_gf_ghz).validate();
    } catch (const ConfigError &) {
        throw;
    } catch (const Error &e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    if (montecarlo.lambda_grid.empty()) throw ConfigError("montecarlo.lambda_grid must not be empty");
    if (montecarlo.repeated_runs < 1) throw ConfigError("montecarlo.repeated_runs must be positive");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

RunConfig parse_config(const std::string &json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    Reader r(j, "");
    visit(r, c);
    r.finish();
    c.montecarlo.spec.seed = c.pipeline.seed;
    c.pipeline.protocol.seed = c.pipeline.seed;
    c.validate();
    return c;
}

RunConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string dump_config(const RunConfig &config) {
    RunConfig copy = config;
    json j = json::object();
    Writer w(j);
    visit(w, copy);
    return j.dump(2);
}

}  // namespace qthermo
