#include "qnet_asym/sweep.hpp"

#include "sweep_fields.hpp"

#include "qnet_asym/chain_sim.hpp"
#include "qnet_asym/dispersion.hpp"
#include "qnet_asym/errors.hpp"
#include "qnet_asym/link_physics.hpp"

#include <json.hpp>

#include <cmath>
#include <set>
#include <string>
#include <variant>

namespace qnet_asym::sweep {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double max_length_km = 1e5;
constexpr double max_l_att_km = 1e4;
constexpr double max_c_km_per_s = 299792.458;

[[noreturn]] void fail(const std::string& key, const std::string& what)
{
    throw InvalidParameter("config key '" + key + "': " + what);
}

template <class P>
using Member = std::variant<double P::*, std::size_t P::*, int P::*, bool P::*>;
static_assert(std::is_same_v<std::size_t, std::uint64_t>, "uint64 fields use the size_t slot");

template <class P>
struct Field {
    const char* key;
    Member<P> member;
};

const std::vector<Field<MidpointParams>>& midpoint_fields()
{
    using P = MidpointParams;
    static const std::vector<Field<P>> f{
        {"l_tot_km", &P::l_tot_km},     {"delta_l_km", &P::delta_l_km}, {"p0", &P::p0},
        {"l_att_km", &P::l_att_km},     {"p_dc", &P::p_dc},             {"visibility", &P::visibility},
        {"f_em_left", &P::f_em_left},   {"f_em_right", &P::f_em_right}, {"q", &P::q},
        {"c_km_per_s", &P::c_km_per_s},
    };
    return f;
}

const std::vector<Field<DispersionParams>>& dispersion_fields()
{
    using P = DispersionParams;
    static const std::vector<Field<P>> f{
        {"photon_duration_ps", &P::photon_duration_ps},
        {"delta_l_km", &P::delta_l_km},
        {"beta2_ps2_per_km", &P::beta2_ps2_per_km},
        {"beta3_ps3_per_km", &P::beta3_ps3_per_km},
        {"delta_t_ps", &P::delta_t_ps},
        {"delta_omega_rad_per_ps", &P::delta_omega_rad_per_ps},
        {"numeric", &P::numeric},
    };
    return f;
}

const std::vector<Field<ChainParams>>& chain_fields()
{
    using P = ChainParams;
    static const std::vector<Field<P>> f{
        {"total_length_km", &P::total_length_km},
        {"n_repeaters", &P::n_repeaters},
        {"a_chain", &P::a_chain},
        {"first_sign", &P::first_sign},
        {"c_km_per_s", &P::c_km_per_s},
        {"l_att_km", &P::l_att_km},
        {"t_coh_s", &P::t_coh_s},
        {"n_runs", &P::n_runs},
        {"master_seed", &P::master_seed},
        {"include_swap_notification_delay", &P::include_swap_notification_delay},
        {"asymmetric", &P::asymmetric},
        {"extended_fiber", &P::extended_fiber},
    };
    return f;
}

double read_number(const json& v, const std::string& key)
{
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
}

std::uint64_t read_unsigned(const json& v, const std::string& key)
{
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        fail(key, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

template <class P>
void read_field(P& p, const Field<P>& f, const json& v)
{
    const std::string key = f.key;
    std::visit(
        [&](auto m) {
            using T = std::remove_reference_t<decltype(p.*m)>;
            if constexpr (std::is_same_v<T, double>) {
                p.*m = read_number(v, key);
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) fail(key, "expected true or false");
                p.*m = v.get<bool>();
            } else if constexpr (std::is_same_v<T, int>) {
                if (!v.is_number_integer()) fail(key, "expected an integer");
                p.*m = static_cast<int>(v.get<std::int64_t>());
            } else {
                p.*m = static_cast<T>(read_unsigned(v, key));
            }
        },
        f.member);
}

template <class P>
void write_field(const P& p, const Field<P>& f, ordered_json& out)
{
    std::visit([&](auto m) { out[f.key] = p.*m; }, f.member);
}

template <class P>
double* double_field(P& p, const std::vector<Field<P>>& fields, const std::string& name)
{
    for (const auto& f : fields)
        if (f.key == name)
            if (auto m = std::get_if<double P::*>(&f.member)) return &(p.**m);
    return nullptr;
}

void check_range(const std::string& key, double x, double lo, double hi, bool lo_open = false)
{
    const bool ok = lo_open ? (x > lo && x <= hi) : (x >= lo && x <= hi);
    if (!ok) {
        fail(key, "value " + format_double(x) + " outside " + (lo_open ? "(" : "[") + format_double(lo) + ", " +
                      format_double(hi) + "]");
    }
}

void validate_point(const MidpointParams& m)
{
    check_range("l_tot_km", m.l_tot_km, 0.0, max_length_km);
    check_range("delta_l_km", std::abs(m.delta_l_km), 0.0, m.l_tot_km);
    check_range("l_att_km", m.l_att_km, 0.0, max_l_att_km, true);
    check_range("c_km_per_s", m.c_km_per_s, 0.0, max_c_km_per_s, true);
    for (auto [k, v] : {std::pair{"p0", m.p0}, {"p_dc", m.p_dc}, {"visibility", m.visibility}, {"q", m.q}})
        check_range(k, v, 0.0, 1.0);
    check_range("f_em_left", m.f_em_left, 0.25, 1.0);
    check_range("f_em_right", m.f_em_right, 0.25, 1.0);
}

void validate_point(const DispersionParams& d)
{
    check_range("photon_duration_ps", d.photon_duration_ps, 0.0, 1e9, true);
    check_range("delta_l_km", std::abs(d.delta_l_km), 0.0, max_length_km);
    check_range("beta2_ps2_per_km", std::abs(d.beta2_ps2_per_km), 0.0, 1e4);
    check_range("beta3_ps3_per_km", std::abs(d.beta3_ps3_per_km), 0.0, 1e4);
}

void validate_point(const ChainParams& c)
{
    check_range("total_length_km", c.total_length_km, 0.0, max_length_km, true);
    check_range("a_chain", c.a_chain, 0.0, 1.0);
    if (c.a_chain >= 1.0) fail("a_chain", "must be < 1");
    if (c.n_repeaters < 1) fail("n_repeaters", "must be >= 1");
    if (c.first_sign != 1 && c.first_sign != -1) fail("first_sign", "must be +1 or -1");
    check_range("c_km_per_s", c.c_km_per_s, 0.0, max_c_km_per_s, true);
    check_range("l_att_km", c.l_att_km, 0.0, max_l_att_km, true);
    check_range("t_coh_s", c.t_coh_s, 0.0, 1e9, true);
    if (c.n_runs < 2) fail("n_runs", "must be >= 2");
    if (!c.asymmetric && !c.extended_fiber) fail("asymmetric", "at least one of asymmetric / extended_fiber must be true");
    const auto t = chain::build_chain(c.total_length_km, c.n_repeaters, c.a_chain, c.first_sign);
    for (double l : t.link_lengths_km()) chain::LinkModel::from_length(l, c.c_km_per_s, c.l_att_km);
}

template <class P>
void parse_params(P& p, const std::vector<Field<P>>& fields, const json& obj, std::set<std::string>& handled)
{
    for (const auto& f : fields) {
        if (obj.contains(f.key)) {
            read_field(p, f, obj.at(f.key));
            handled.insert(f.key);
        }
    }
}

void parse_attenuation(double& l_att, const json& obj, std::set<std::string>& handled)
{
    if (!obj.contains("attenuation_db_per_km")) return;
    if (obj.contains("l_att_km")) fail("attenuation_db_per_km", "give either l_att_km or attenuation_db_per_km");
    const double db = read_number(obj.at("attenuation_db_per_km"), "attenuation_db_per_km");
    check_range("attenuation_db_per_km", db, 0.0, 100.0, true);
    l_att = link::attenuation_length_km(db);
    handled.insert("attenuation_db_per_km");
}

Sweep parse_sweep(const json& s)
{
    if (!s.is_object()) fail("sweep", "expected an object");
    Sweep out;
    for (const auto& [k, v] : s.items()) {
        if (k == "variable") {
            if (!v.is_string()) fail("sweep.variable", "expected a string");
            out.variable = v.get<std::string>();
        } else if (k == "values") {
            if (!v.is_array() || v.empty()) fail("sweep.values", "expected a non-empty array of numbers");
            for (const auto& x : v) out.values.push_back(read_number(x, "sweep.values"));
        } else if (k == "start") {
            out.start = read_number(v, "sweep.start");
        } else if (k == "stop") {
            out.stop = read_number(v, "sweep.stop");
        } else if (k == "points") {
            out.points = static_cast<std::size_t>(read_unsigned(v, "sweep.points"));
        } else if (k == "scale") {
            if (!v.is_string() || (v != "linear" && v != "log")) fail("sweep.scale", "expected \"linear\" or \"log\"");
            out.log_scale = v == "log";
        } else {
            fail("sweep." + k, "unknown key");
        }
    }
    if (out.variable.empty()) fail("sweep.variable", "missing");
    const bool range = out.start || out.stop || out.points;
    if (range == !out.values.empty()) fail("sweep", "give either values or start/stop/points");
    if (range) {
        if (!(out.start && out.stop && out.points)) fail("sweep", "a range needs start, stop and points");
        if (*out.points < 1 || *out.points > 1000000) fail("sweep.points", "must lie in [1, 1000000]");
        if (out.log_scale && !(*out.start > 0.0 && *out.stop > 0.0)) fail("sweep.scale", "log scale needs start, stop > 0");
    } else if (out.log_scale) {
        fail("sweep.scale", "only applies to start/stop/points ranges");
    }
    return out;
}

template <class P>
void check_sweep_points(const P& base, const std::vector<Field<P>>& fields, const Sweep& s)
{
    P probe = base;
    if (!double_field(probe, fields, s.variable))
        fail("sweep.variable", "'" + s.variable + "' is not a sweepable parameter of this mode");
    for (double x : s.grid()) {
        P p = base;
        *double_field(p, fields, s.variable) = x;
        try {
            validate_point(p);
        } catch (const InvalidParameter& e) {
            throw InvalidParameter(std::string(e.what()) + " (at sweep value " + format_double(x) + ")");
        }
    }
}

}  // namespace

namespace detail {

double* sweep_target(MidpointParams& p, const std::string& name) { return double_field(p, midpoint_fields(), name); }
double* sweep_target(DispersionParams& p, const std::string& name) { return double_field(p, dispersion_fields(), name); }
double* sweep_target(ChainParams& p, const std::string& name) { return double_field(p, chain_fields(), name); }

}  // namespace detail

std::string_view to_string(Mode m)
{
    switch (m) {
    case Mode::Midpoint: return "midpoint";
    case Mode::Dispersion: return "dispersion";
    case Mode::Chain: return "chain";
    }
    return "?";
}

Mode mode_from_string(std::string_view s)
{
    if (s == "midpoint") return Mode::Midpoint;
    if (s == "dispersion") return Mode::Dispersion;
    if (s == "chain") return Mode::Chain;
    throw InvalidParameter("unknown mode '" + std::string(s) + "' (expected midpoint, dispersion or chain)");
}

std::vector<double> Sweep::grid() const
{
    if (!values.empty()) return values;
    const std::size_t n = points.value_or(1);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        g[i] = log_scale ? std::exp(std::log(*start) + f * (std::log(*stop) - std::log(*start)))
                         : *start + f * (*stop - *start);
    }
    g.front() = *start;
    if (n > 1) g.back() = *stop;
    return g;
}

SweepConfig parse_config(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidParameter(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InvalidParameter("config must be a JSON object");

    SweepConfig cfg;
    for (const auto& [k, v] : doc.items()) {
        if (k != "mode" && k != "parameters" && k != "sweep" && k != "output" && k != "workers")
            fail(k, "unknown key");
    }
    if (!doc.contains("mode") || !doc["mode"].is_string()) fail("mode", "missing or not a string");
    cfg.mode = mode_from_string(doc["mode"].get<std::string>());
    if (doc.contains("output")) {
        if (!doc["output"].is_string()) fail("output", "expected a string");
        cfg.output = doc["output"].get<std::string>();
    }
    if (doc.contains("workers")) {
        const auto w = read_unsigned(doc["workers"], "workers");
        if (w < 1 || w > 1024) fail("workers", "must lie in [1, 1024]");
        cfg.workers = static_cast<unsigned>(w);
    }
    if (!doc.contains("sweep")) fail("sweep", "missing");
    cfg.sweep = parse_sweep(doc["sweep"]);

    const json params = doc.contains("parameters") ? doc["parameters"] : json::object();
    if (!params.is_object()) fail("parameters", "expected an object");
    std::set<std::string> handled;

    switch (cfg.mode) {
    case Mode::Midpoint: {
        parse_params(cfg.midpoint, midpoint_fields(), params, handled);
        parse_attenuation(cfg.midpoint.l_att_km, params, handled);
        if (params.contains("detector")) {
            const auto& d = params["detector"];
            if (d == "non_number_resolving")
                cfg.midpoint.detector = link::DetectorResolution::NonNumberResolving;
            else if (d == "number_resolving")
                cfg.midpoint.detector = link::DetectorResolution::NumberResolving;
            else
                fail("parameters.detector", "expected \"non_number_resolving\" or \"number_resolving\"");
            handled.insert("detector");
        }
        break;
    }
    case Mode::Dispersion: {
        auto& d = cfg.dispersion;
        parse_params(d, dispersion_fields(), params, handled);
        double lambda = 1550.0;
        if (params.contains("wavelength_nm")) {
            lambda = read_number(params["wavelength_nm"], "wavelength_nm");
            check_range("wavelength_nm", lambda, 100.0, 10000.0);
            handled.insert("wavelength_nm");
        }
        if (params.contains("dispersion_ps_per_nm_km")) {
            if (params.contains("beta2_ps2_per_km"))
                fail("dispersion_ps_per_nm_km", "give either beta2_ps2_per_km or dispersion_ps_per_nm_km");
            const double dd = read_number(params["dispersion_ps_per_nm_km"], "dispersion_ps_per_nm_km");
            d.beta2_ps2_per_km = dispersion::beta2_from_dispersion(dd, lambda);
            handled.insert("dispersion_ps_per_nm_km");
            if (params.contains("dispersion_slope_ps_per_nm2_km")) {
                if (params.contains("beta3_ps3_per_km"))
                    fail("dispersion_slope_ps_per_nm2_km", "give either beta3_ps3_per_km or a dispersion slope");
                const double s = read_number(params["dispersion_slope_ps_per_nm2_km"], "dispersion_slope_ps_per_nm2_km");
                d.beta3_ps3_per_km = dispersion::beta3_from_slope(dd, s, lambda);
                handled.insert("dispersion_slope_ps_per_nm2_km");
            }
        } else if (params.contains("dispersion_slope_ps_per_nm2_km")) {
            fail("dispersion_slope_ps_per_nm2_km", "needs dispersion_ps_per_nm_km as well");
        }
        break;
    }
    case Mode::Chain: {
        parse_params(cfg.chain, chain_fields(), params, handled);
        parse_attenuation(cfg.chain.l_att_km, params, handled);
        break;
    }
    }
    for (const auto& [k, v] : params.items())
        if (!handled.count(k)) fail("parameters." + k, "unknown key for mode " + std::string(to_string(cfg.mode)));
    if (handled.count(cfg.sweep.variable))
        fail("parameters." + cfg.sweep.variable, "is also the sweep variable; give it in one place only");

    switch (cfg.mode) {
    case Mode::Midpoint: check_sweep_points(cfg.midpoint, midpoint_fields(), cfg.sweep); break;
    case Mode::Dispersion: check_sweep_points(cfg.dispersion, dispersion_fields(), cfg.sweep); break;
    case Mode::Chain: check_sweep_points(cfg.chain, chain_fields(), cfg.sweep); break;
    }
    return cfg;
}

std::string emit_config(const SweepConfig& cfg)
{
    ordered_json doc;
    doc["mode"] = std::string(to_string(cfg.mode));
    if (!cfg.output.empty()) doc["output"] = cfg.output;
    doc["workers"] = cfg.workers;

    ordered_json params = ordered_json::object();
    auto emit = [&](const auto& p, const auto& fields) {
        for (const auto& f : fields)
            if (f.key != cfg.sweep.variable) write_field(p, f, params);
    };
    switch (cfg.mode) {
    case Mode::Midpoint:
        emit(cfg.midpoint, midpoint_fields());
        params["detector"] = cfg.midpoint.detector == link::DetectorResolution::NumberResolving
                                 ? "number_resolving"
                                 : "non_number_resolving";
        break;
    case Mode::Dispersion: emit(cfg.dispersion, dispersion_fields()); break;
    case Mode::Chain: emit(cfg.chain, chain_fields()); break;
    }
    doc["parameters"] = params;

    ordered_json s;
    s["variable"] = cfg.sweep.variable;
    if (!cfg.sweep.values.empty()) {
        s["values"] = cfg.sweep.values;
    } else {
        s["start"] = *cfg.sweep.start;
        s["stop"] = *cfg.sweep.stop;
        s["points"] = *cfg.sweep.points;
        s["scale"] = cfg.sweep.log_scale ? "log" : "linear";
    }
    doc["sweep"] = s;
    return doc.dump(2) + "\n";
}

}  // namespace qnet_asym::sweep
