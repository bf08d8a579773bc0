#include "feeddrive/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>

#include "json.hpp"

namespace feeddrive {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::domain_error("config: " + path + ": " + what);
}

/// Rejects keys outside the allowed set, naming the first offender.
void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) { known = true; break; }
        if (!known) fail(path + "." + item.key(), "unknown key");
    }
}

/// Records the effective value of a setting; defaults are marked as such.
void note(std::vector<std::string>* provenance, const std::string& path,
          const std::string& value, bool defaulted) {
    if (provenance)
        provenance->push_back(path + " = " + value + (defaulted ? " (default)" : ""));
}

void note_default(std::vector<std::string>* provenance, const std::string& path,
                  const std::string& value) {
    note(provenance, path, value, true);
}

std::string show(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string show(const std::vector<double>& v) {
    std::string joined = "[";
    for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? ", " : "") + show(v[i]);
    return joined + "]";
}

double get_number(const json& obj, const std::string& path) {
    if (!obj.is_number()) fail(path, "expected a number");
    return obj.get<double>();
}

/// Fetches a numeric field, falling back to `fallback`; the effective value is
/// echoed into the provenance log either way.
double number_or(const json& obj, const std::string& key, const std::string& path,
                 double fallback, std::vector<std::string>* provenance) {
    const bool defaulted = !obj.contains(key);
    const double value = defaulted ? fallback : get_number(obj.at(key), path + "." + key);
    note(provenance, path + "." + key, show(value), defaulted);
    return value;
}

std::uint64_t unsigned_or(const json& obj, const std::string& key, const std::string& path,
                          std::uint64_t fallback, std::vector<std::string>* provenance) {
    if (!obj.contains(key)) {
        note(provenance, path + "." + key, std::to_string(fallback), true);
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.is_number_unsigned() == false &&
                                   v.get<std::int64_t>() < 0))
        fail(path + "." + key, "expected a non-negative integer");
    note(provenance, path + "." + key, std::to_string(v.get<std::uint64_t>()), false);
    return v.get<std::uint64_t>();
}

std::string string_or(const json& obj, const std::string& key, const std::string& path,
                      const std::string& fallback, std::vector<std::string>* provenance) {
    if (!obj.contains(key)) {
        note(provenance, path + "." + key, fallback, true);
        return fallback;
    }
    if (!obj.at(key).is_string()) fail(path + "." + key, "expected a string");
    note(provenance, path + "." + key, obj.at(key).get<std::string>(), false);
    return obj.at(key).get<std::string>();
}

std::vector<double> number_list_or(const json& obj, const std::string& key,
                                   const std::string& path, std::vector<double> fallback,
                                   std::vector<std::string>* provenance) {
    if (!obj.contains(key)) {
        note(provenance, path + "." + key, show(fallback), true);
        return fallback;
    }
    const json& arr = obj.at(key);
    if (!arr.is_array() || arr.empty()) fail(path + "." + key, "expected a non-empty array");
    std::vector<double> out;
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.push_back(get_number(arr[i], path + "." + key + "[" + std::to_string(i) + "]"));
    note(provenance, path + "." + key, show(out), false);
    return out;
}

void require_positive(double v, const std::string& path) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(path, "must be a positive finite number");
}

SearchSpace::Bound bound_or(const json& obj, const std::string& key, const std::string& path,
                            SearchSpace::Bound fallback,
                            std::vector<std::string>* provenance) {
    if (!obj.contains(key)) {
        note(provenance, path + "." + key,
             "[" + show(fallback.lower) + ", " + show(fallback.upper) + "]", true);
        return fallback;
    }
    const json& arr = obj.at(key);
    if (!arr.is_array() || arr.size() != 2)
        fail(path + "." + key, "expected [lower, upper]");
    SearchSpace::Bound b = fallback;
    b.lower = get_number(arr[0], path + "." + key + "[0]");
    b.upper = get_number(arr[1], path + "." + key + "[1]");
    if (!(b.lower < b.upper)) fail(path + "." + key, "lower must be < upper");
    note(provenance, path + "." + key,
         "[" + show(b.lower) + ", " + show(b.upper) + "]", false);
    return b;
}

MotorSpec parse_motor(const json& row, const std::string& path) {
    if (!row.is_object()) fail(path, "expected an object");
    check_keys(row, path,
               {"id", "model", "max_torque_Nm", "rotor_inertia_kgcm2", "rated_power_kW",
                "declared_inertia_ratio", "declared_capacity_Nm_per_kgcm2"});
    for (const char* key : {"id", "model", "max_torque_Nm", "rotor_inertia_kgcm2"})
        if (!row.contains(key)) fail(path + "." + key, "missing required field");
    MotorSpec m;
    if (!row.at("id").is_string()) fail(path + ".id", "expected a string");
    if (!row.at("model").is_string()) fail(path + ".model", "expected a string");
    m.id = row.at("id").get<std::string>();
    m.model = row.at("model").get<std::string>();
    m.max_torque = get_number(row.at("max_torque_Nm"), path + ".max_torque_Nm");
    m.rotor_inertia = get_number(row.at("rotor_inertia_kgcm2"), path + ".rotor_inertia_kgcm2");
    require_positive(m.max_torque, path + ".max_torque_Nm");
    require_positive(m.rotor_inertia, path + ".rotor_inertia_kgcm2");
    if (row.contains("rated_power_kW")) {
        m.rated_power = get_number(row.at("rated_power_kW"), path + ".rated_power_kW");
        if (m.rated_power < 0.0) fail(path + ".rated_power_kW", "must be >= 0");
    }
    if (row.contains("declared_inertia_ratio"))
        m.declared_ratio =
            get_number(row.at("declared_inertia_ratio"), path + ".declared_inertia_ratio");
    if (row.contains("declared_capacity_Nm_per_kgcm2"))
        m.declared_capacity = get_number(row.at("declared_capacity_Nm_per_kgcm2"),
                                         path + ".declared_capacity_Nm_per_kgcm2");
    return m;
}

json motor_json(const MotorSpec& m) {
    json row;
    row["id"] = m.id;
    row["model"] = m.model;
    row["max_torque_Nm"] = m.max_torque;
    row["rotor_inertia_kgcm2"] = m.rotor_inertia;
    if (m.rated_power != 0.0) row["rated_power_kW"] = m.rated_power;
    if (!std::isnan(m.declared_ratio)) row["declared_inertia_ratio"] = m.declared_ratio;
    if (!std::isnan(m.declared_capacity))
        row["declared_capacity_Nm_per_kgcm2"] = m.declared_capacity;
    return row;
}

}  // namespace

RunConfig::RunConfig() : catalog(reference_catalog()) {}

MechanicalParams RunConfig::mechanism() const {
    // Placeholder rotor values; instantiate_motor swaps in each catalog row.
    return MechanicalParams::from_catalog(screw_stiffness_Nm_per_rad, 1.0, load_inertia_kgcm2,
                                          coupling_damping_Nms_per_rad, drive_coeff_mm_per_rad,
                                          1.0);
}

void RunConfig::validate() const {
    if (!(screw_stiffness_Nm_per_rad > 0.0))
        throw std::domain_error("config: mechanism.screw_stiffness_Nm_per_rad must be > 0");
    if (coupling_damping_Nms_per_rad < 0.0)
        throw std::domain_error("config: mechanism.coupling_damping_Nms_per_rad must be >= 0");
    if (!(load_inertia_kgcm2 > 0.0))
        throw std::domain_error("config: mechanism.load_inertia_kgcm2 must be > 0");
    if (!(drive_coeff_mm_per_rad > 0.0))
        throw std::domain_error("config: mechanism.drive_coeff_mm_per_rad must be > 0");
    if (catalog.empty()) throw std::domain_error("config: catalog must not be empty");
    for (const MotorSpec& m : catalog) m.validate();
    grid.validate();
    sim.validate();
    if (algorithm != "fwa" && algorithm != "ga" && algorithm != "both")
        throw std::domain_error("config: optimizer.algorithm must be fwa, ga, or both");
    if (budget == 0) throw std::domain_error("config: optimizer.budget must be > 0");
    bounds.validate();
    if (bounds.dims() != 4)
        throw std::domain_error("config: optimizer.bounds must cover the four gains");
}

RunConfig parse_config(const std::string& json_text, std::vector<std::string>* provenance) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::domain_error(std::string("config: not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::domain_error("config: top level must be an object");
    check_keys(doc, "config",
               {"mechanism", "catalog", "process", "simulation", "optimizer", "output_dir"});

    RunConfig cfg;
    const json empty = json::object();

    {
        const json& mech = doc.contains("mechanism") ? doc.at("mechanism") : empty;
        if (!mech.is_object()) fail("config.mechanism", "expected an object");
        check_keys(mech, "config.mechanism",
                   {"screw_stiffness_Nm_per_rad", "coupling_damping_Nms_per_rad",
                    "load_inertia_kgcm2", "drive_coeff_mm_per_rad"});
        cfg.screw_stiffness_Nm_per_rad =
            number_or(mech, "screw_stiffness_Nm_per_rad", "config.mechanism",
                      cfg.screw_stiffness_Nm_per_rad, provenance);
        cfg.coupling_damping_Nms_per_rad =
            number_or(mech, "coupling_damping_Nms_per_rad", "config.mechanism",
                      cfg.coupling_damping_Nms_per_rad, provenance);
        cfg.load_inertia_kgcm2 = number_or(mech, "load_inertia_kgcm2", "config.mechanism",
                                           cfg.load_inertia_kgcm2, provenance);
        cfg.drive_coeff_mm_per_rad = number_or(mech, "drive_coeff_mm_per_rad",
                                               "config.mechanism", cfg.drive_coeff_mm_per_rad,
                                               provenance);
    }

    if (doc.contains("catalog")) {
        const json& rows = doc.at("catalog");
        if (!rows.is_array() || rows.empty())
            fail("config.catalog", "expected a non-empty array");
        cfg.catalog.clear();
        for (std::size_t i = 0; i < rows.size(); ++i)
            cfg.catalog.push_back(
                parse_motor(rows[i], "config.catalog[" + std::to_string(i) + "]"));
        note(provenance, "config.catalog",
             std::to_string(cfg.catalog.size()) + " motors", false);
    } else {
        note_default(provenance, "config.catalog",
                     std::to_string(cfg.catalog.size()) + " reference motors");
    }

    {
        const json& grid = doc.contains("process") ? doc.at("process") : empty;
        if (!grid.is_object()) fail("config.process", "expected an object");
        check_keys(grid, "config.process",
                   {"speeds_mm_per_s", "accelerations_m_per_s2", "stroke_mm", "cycles",
                    "dwell_s"});
        cfg.grid.speeds_mm_s = number_list_or(grid, "speeds_mm_per_s", "config.process",
                                              cfg.grid.speeds_mm_s, provenance);
        cfg.grid.accels_m_s2 = number_list_or(grid, "accelerations_m_per_s2", "config.process",
                                              cfg.grid.accels_m_s2, provenance);
        cfg.grid.stroke_mm =
            number_or(grid, "stroke_mm", "config.process", cfg.grid.stroke_mm, provenance);
        cfg.grid.cycles = int(unsigned_or(grid, "cycles", "config.process",
                                          std::uint64_t(cfg.grid.cycles), provenance));
        cfg.grid.dwell_s =
            number_or(grid, "dwell_s", "config.process", cfg.grid.dwell_s, provenance);
    }

    {
        const json& sim = doc.contains("simulation") ? doc.at("simulation") : empty;
        if (!sim.is_object()) fail("config.simulation", "expected an object");
        check_keys(sim, "config.simulation", {"dt_s", "settle_tail_s", "encoder_counts_per_rev"});
        cfg.sim.dt = number_or(sim, "dt_s", "config.simulation", cfg.sim.dt, provenance);
        cfg.sim.settle_tail = number_or(sim, "settle_tail_s", "config.simulation",
                                        cfg.sim.settle_tail, provenance);
        cfg.sim.encoder_counts_per_rev =
            int(unsigned_or(sim, "encoder_counts_per_rev", "config.simulation",
                            std::uint64_t(cfg.sim.encoder_counts_per_rev), provenance));
    }

    {
        const json& opt = doc.contains("optimizer") ? doc.at("optimizer") : empty;
        if (!opt.is_object()) fail("config.optimizer", "expected an object");
        check_keys(opt, "config.optimizer",
                   {"algorithm", "budget", "master_seed", "bounds", "fireworks", "island_ga"});
        cfg.algorithm =
            string_or(opt, "algorithm", "config.optimizer", cfg.algorithm, provenance);
        cfg.budget = std::size_t(
            unsigned_or(opt, "budget", "config.optimizer", cfg.budget, provenance));
        cfg.master_seed =
            unsigned_or(opt, "master_seed", "config.optimizer", cfg.master_seed, provenance);
        {
            const json& bounds = opt.contains("bounds") ? opt.at("bounds") : empty;
            if (!bounds.is_object()) fail("config.optimizer.bounds", "expected an object");
            check_keys(bounds, "config.optimizer.bounds",
                       {"kp_per_s", "kvp_Nms_per_rad", "kvi_Nm_per_rad", "kfv"});
            const char* keys[] = {"kp_per_s", "kvp_Nms_per_rad", "kvi_Nm_per_rad", "kfv"};
            for (std::size_t d = 0; d < 4; ++d)
                cfg.bounds.bounds[d] = bound_or(bounds, keys[d], "config.optimizer.bounds",
                                                cfg.bounds.bounds[d], provenance);
        }
        {
            const json& fw = opt.contains("fireworks") ? opt.at("fireworks") : empty;
            if (!fw.is_object()) fail("config.optimizer.fireworks", "expected an object");
            check_keys(fw, "config.optimizer.fireworks",
                       {"fireworks", "total_sparks", "min_sparks", "max_sparks",
                        "amplitude_factor", "amplitude_floor_init", "amplitude_floor",
                        "gaussian_sparks", "gaussian_sigma", "restart_after",
                        "restart_tolerance", "init_design"});
            const std::string p = "config.optimizer.fireworks";
            cfg.fwa.fireworks =
                std::size_t(unsigned_or(fw, "fireworks", p, cfg.fwa.fireworks, provenance));
            cfg.fwa.total_sparks = std::size_t(
                unsigned_or(fw, "total_sparks", p, cfg.fwa.total_sparks, provenance));
            cfg.fwa.min_sparks =
                std::size_t(unsigned_or(fw, "min_sparks", p, cfg.fwa.min_sparks, provenance));
            cfg.fwa.max_sparks =
                std::size_t(unsigned_or(fw, "max_sparks", p, cfg.fwa.max_sparks, provenance));
            cfg.fwa.amplitude_factor =
                number_or(fw, "amplitude_factor", p, cfg.fwa.amplitude_factor, provenance);
            cfg.fwa.amplitude_floor_init =
                number_or(fw, "amplitude_floor_init", p, cfg.fwa.amplitude_floor_init,
                          provenance);
            cfg.fwa.amplitude_floor =
                number_or(fw, "amplitude_floor", p, cfg.fwa.amplitude_floor, provenance);
            cfg.fwa.gaussian_sparks = std::size_t(
                unsigned_or(fw, "gaussian_sparks", p, cfg.fwa.gaussian_sparks, provenance));
            cfg.fwa.gaussian_sigma =
                number_or(fw, "gaussian_sigma", p, cfg.fwa.gaussian_sigma, provenance);
            cfg.fwa.restart_after = std::size_t(
                unsigned_or(fw, "restart_after", p, cfg.fwa.restart_after, provenance));
            cfg.fwa.restart_tolerance =
                number_or(fw, "restart_tolerance", p, cfg.fwa.restart_tolerance, provenance);
            cfg.fwa.init_design = std::size_t(
                unsigned_or(fw, "init_design", p, cfg.fwa.init_design, provenance));
        }
        {
            const json& ga = opt.contains("island_ga") ? opt.at("island_ga") : empty;
            if (!ga.is_object()) fail("config.optimizer.island_ga", "expected an object");
            check_keys(ga, "config.optimizer.island_ga",
                       {"islands", "island_size", "tournament", "crossover_rate", "blx_alpha",
                        "mutation_rate", "mutation_sigma", "migration_interval", "migrants",
                        "elites", "init_design"});
            const std::string p = "config.optimizer.island_ga";
            cfg.ga.islands =
                std::size_t(unsigned_or(ga, "islands", p, cfg.ga.islands, provenance));
            cfg.ga.island_size =
                std::size_t(unsigned_or(ga, "island_size", p, cfg.ga.island_size, provenance));
            cfg.ga.tournament =
                std::size_t(unsigned_or(ga, "tournament", p, cfg.ga.tournament, provenance));
            cfg.ga.crossover_rate =
                number_or(ga, "crossover_rate", p, cfg.ga.crossover_rate, provenance);
            cfg.ga.blx_alpha = number_or(ga, "blx_alpha", p, cfg.ga.blx_alpha, provenance);
            cfg.ga.mutation_rate =
                number_or(ga, "mutation_rate", p, cfg.ga.mutation_rate, provenance);
            cfg.ga.mutation_sigma =
                number_or(ga, "mutation_sigma", p, cfg.ga.mutation_sigma, provenance);
            cfg.ga.migration_interval = std::size_t(
                unsigned_or(ga, "migration_interval", p, cfg.ga.migration_interval, provenance));
            cfg.ga.migrants =
                std::size_t(unsigned_or(ga, "migrants", p, cfg.ga.migrants, provenance));
            cfg.ga.elites = std::size_t(unsigned_or(ga, "elites", p, cfg.ga.elites, provenance));
            cfg.ga.init_design = std::size_t(
                unsigned_or(ga, "init_design", p, cfg.ga.init_design, provenance));
        }
    }

    cfg.output_dir = string_or(doc, "output_dir", "config", cfg.output_dir, provenance);

    try {
        cfg.validate();
    } catch (const std::domain_error&) {
        throw;
    }
    return cfg;
}

RunConfig load_config(const std::string& path, std::vector<std::string>* provenance) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("config: cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), provenance);
}

std::string serialize_config(const RunConfig& config) {
    json doc;
    doc["mechanism"] = {
        {"screw_stiffness_Nm_per_rad", config.screw_stiffness_Nm_per_rad},
        {"coupling_damping_Nms_per_rad", config.coupling_damping_Nms_per_rad},
        {"load_inertia_kgcm2", config.load_inertia_kgcm2},
        {"drive_coeff_mm_per_rad", config.drive_coeff_mm_per_rad},
    };
    doc["catalog"] = json::array();
    for (const MotorSpec& m : config.catalog) doc["catalog"].push_back(motor_json(m));
    doc["process"] = {
        {"speeds_mm_per_s", config.grid.speeds_mm_s},
        {"accelerations_m_per_s2", config.grid.accels_m_s2},
        {"stroke_mm", config.grid.stroke_mm},
        {"cycles", config.grid.cycles},
        {"dwell_s", config.grid.dwell_s},
    };
    doc["simulation"] = {
        {"dt_s", config.sim.dt},
        {"settle_tail_s", config.sim.settle_tail},
        {"encoder_counts_per_rev", config.sim.encoder_counts_per_rev},
    };
    doc["optimizer"] = {
        {"algorithm", config.algorithm},
        {"budget", config.budget},
        {"master_seed", config.master_seed},
        {"bounds",
         {
             {"kp_per_s", {config.bounds.bounds[0].lower, config.bounds.bounds[0].upper}},
             {"kvp_Nms_per_rad", {config.bounds.bounds[1].lower, config.bounds.bounds[1].upper}},
             {"kvi_Nm_per_rad", {config.bounds.bounds[2].lower, config.bounds.bounds[2].upper}},
             {"kfv", {config.bounds.bounds[3].lower, config.bounds.bounds[3].upper}},
         }},
        {"fireworks",
         {
             {"fireworks", config.fwa.fireworks},
             {"total_sparks", config.fwa.total_sparks},
             {"min_sparks", config.fwa.min_sparks},
             {"max_sparks", config.fwa.max_sparks},
             {"amplitude_factor", config.fwa.amplitude_factor},
             {"amplitude_floor_init", config.fwa.amplitude_floor_init},
             {"amplitude_floor", config.fwa.amplitude_floor},
             {"gaussian_sparks", config.fwa.gaussian_sparks},
             {"gaussian_sigma", config.fwa.gaussian_sigma},
             {"restart_after", config.fwa.restart_after},
             {"restart_tolerance", config.fwa.restart_tolerance},
             {"init_design", config.fwa.init_design},
         }},
        {"island_ga",
         {
             {"islands", config.ga.islands},
             {"island_size", config.ga.island_size},
             {"tournament", config.ga.tournament},
             {"crossover_rate", config.ga.crossover_rate},
             {"blx_alpha", config.ga.blx_alpha},
             {"mutation_rate", config.ga.mutation_rate},
             {"mutation_sigma", config.ga.mutation_sigma},
             {"migration_interval", config.ga.migration_interval},
             {"migrants", config.ga.migrants},
             {"elites", config.ga.elites},
             {"init_design", config.ga.init_design},
         }},
    };
    doc["output_dir"] = config.output_dir;
    return doc.dump(2);
}

std::string config_digest(const RunConfig& config) {
    const std::string canonical = serialize_config(config);
    std::uint64_t hash = 0xcbf29ce484222325ull;  // FNV-1a 64-bit offset basis
    for (unsigned char c : canonical) {
        hash ^= c;
        hash *= 0x100000001b3ull;  // FNV prime
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[std::size_t(i)] = hex[hash & 0xf];
        hash >>= 4;
    }
    return out;
}

}  // namespace feeddrive
