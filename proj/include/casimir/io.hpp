#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "casimir/constants.hpp"
#include "casimir/dielectric.hpp"
#include "casimir/errors.hpp"
#include "casimir/fitting.hpp"
#include "casimir/measurement.hpp"

namespace casimir::io {

// ---------------------------------------------------------------------------
// Hashing and formatting
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Shortest exact round-trip decimal; identical bytes for identical doubles.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// CSV output: one comment line with the config hash and constants version,
// then a header row, then data rows.
// ---------------------------------------------------------------------------

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline void write_csv(const std::filesystem::path& path, const Table& table,
                      std::uint64_t config_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path.string());
  out << "# config=" << hex64(config_hash) << " constants=" << constants::table_version << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
    }
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Optical table CSV: header "omega_eV,im_eps", ascending omega
// ---------------------------------------------------------------------------

inline OpticalTable load_optical_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open optical table: " + path.string());
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::vector<double> omega, im_eps;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.find("omega_eV") == std::string::npos)
        throw ConfigError(path.string() + ": line " + std::to_string(line_no) +
                          ": expected header omega_eV,im_eps");
      header_seen = true;
      continue;
    }
    double w, v;
    if (std::sscanf(line.c_str(), "%lf,%lf", &w, &v) != 2) {
      throw ConfigError(path.string() + ": line " + std::to_string(line_no) +
                        ": expected two comma-separated numbers");
    }
    omega.push_back(w);
    im_eps.push_back(v);
  }
  try {
    return OpticalTable(std::move(omega), std::move(im_eps));
  } catch (const std::domain_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Material definition JSON
// ---------------------------------------------------------------------------

struct MaterialConfig {
  std::string name;
  std::string variant;  // drude | plasma | core | dc | tabulated
  std::vector<Oscillator> oscillators;
  std::optional<double> omega_p_eV;
  std::optional<double> gamma_eV;
  std::optional<double> four_pi_sigma0_eV;
  std::optional<std::filesystem::path> table_csv;  // resolved against the json location
};

inline MaterialConfig parse_material(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir) {
  MaterialConfig cfg;
  try {
    cfg.name = j.value("name", "unnamed");
    cfg.variant = j.at("variant").get<std::string>();
    if (j.contains("oscillators")) {
      for (const auto& row : j.at("oscillators")) {
        if (!row.is_array() || row.size() != 3)
          throw ConfigError("material oscillators must be [g, omega, gamma] triples");
        cfg.oscillators.push_back(
            {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
      }
    }
    if (j.contains("omega_p_eV")) cfg.omega_p_eV = j.at("omega_p_eV").get<double>();
    if (j.contains("gamma_eV")) cfg.gamma_eV = j.at("gamma_eV").get<double>();
    if (j.contains("four_pi_sigma0_eV"))
      cfg.four_pi_sigma0_eV = j.at("four_pi_sigma0_eV").get<double>();
    if (j.contains("table_csv"))
      cfg.table_csv = base_dir / j.at("table_csv").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("material json: ") + e.what());
  }
  return cfg;
}

inline MaterialConfig load_material(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open material file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_material(j, path.parent_path());
}

inline PermittivityModel build_model(const MaterialConfig& cfg,
                                     const std::optional<std::string>& variant_override = {}) {
  const std::string variant = variant_override.value_or(cfg.variant);
  OscillatorSet core(cfg.oscillators);
  auto need = [&](const std::optional<double>& v, const char* key) {
    if (!v) throw ConfigError("material '" + cfg.name + "': variant '" + variant +
                              "' requires field " + key);
    return *v;
  };
  try {
    if (variant == "core") return PermittivityModel(CoreOnly{std::move(core)});
    if (variant == "dc")
      return PermittivityModel(
          DcConductivity{std::move(core), need(cfg.four_pi_sigma0_eV, "four_pi_sigma0_eV")});
    if (variant == "drude")
      return PermittivityModel(
          Drude{std::move(core), need(cfg.omega_p_eV, "omega_p_eV"), need(cfg.gamma_eV, "gamma_eV")});
    if (variant == "plasma")
      return PermittivityModel(Plasma{std::move(core), need(cfg.omega_p_eV, "omega_p_eV")});
    if (variant == "tabulated") {
      if (!cfg.table_csv) throw ConfigError("material '" + cfg.name + "': tabulated variant requires table_csv");
      OpticalTable table = load_optical_table_csv(*cfg.table_csv);
      std::optional<DrudeTail> tail;
      if (cfg.omega_p_eV && cfg.gamma_eV) tail = DrudeTail{*cfg.omega_p_eV, *cfg.gamma_eV};
      return PermittivityModel(Tabulated{std::move(table), tail});
    }
  } catch (const std::domain_error& e) {
    throw ConfigError("material '" + cfg.name + "': " + e.what());
  }
  throw ConfigError("material '" + cfg.name + "': unknown variant '" + variant + "'");
}

// ---------------------------------------------------------------------------
// Measurement CSV: header "d_nm,value,sigma_value,sigma_d_nm". Kind and units
// come from a JSON sidecar (<file>.json) or the caller.
// ---------------------------------------------------------------------------

inline MeasurementSet load_measurements_csv(const std::filesystem::path& path,
                                            std::optional<QuantityKind> kind_override = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open measurement file: " + path.string());

  MeasurementSet set;
  set.kind = kind_override.value_or(QuantityKind::pressure);

  const std::filesystem::path sidecar = path.string() + ".json";
  if (!kind_override && std::filesystem::exists(sidecar)) {
    std::ifstream sin(sidecar);
    nlohmann::json j;
    try {
      sin >> j;
      const std::string kind = j.value("kind", "pressure");
      if (kind == "force") set.kind = QuantityKind::force;
      else if (kind != "pressure") throw ConfigError(sidecar.string() + ": kind must be pressure|force");
      set.confidence_level_percent = j.value("confidence_level", 67.0);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(sidecar.string() + ": " + e.what());
    }
  }

  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.find("d_nm") == std::string::npos)
        throw ConfigError(path.string() + ": line " + std::to_string(line_no) +
                          ": expected header d_nm,value,sigma_value,sigma_d_nm");
      header_seen = true;
      continue;
    }
    MeasurementPoint p;
    const int fields =
        std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &p.d_nm, &p.value, &p.sigma_value, &p.sigma_d_nm);
    if (fields < 3) {
      throw ConfigError(path.string() + ": line " + std::to_string(line_no) +
                        ": expected d_nm,value,sigma_value[,sigma_d_nm]");
    }
    if (fields == 3) p.sigma_d_nm = 0.0;
    set.points.push_back(p);
  }
  if (set.points.empty())
    throw ConfigError(path.string() + ": no data rows");
  try {
    set.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return set;
}

inline void write_measurements_csv(const std::filesystem::path& path, const MeasurementSet& set,
                                   std::uint64_t config_hash) {
  Table t;
  t.columns = {"d_nm", "value", "sigma_value", "sigma_d_nm"};
  for (const auto& p : set.points) t.rows.push_back({p.d_nm, p.value, p.sigma_value, p.sigma_d_nm});
  write_csv(path, t, config_hash);
}

// ---------------------------------------------------------------------------
// Fit results and specs
// ---------------------------------------------------------------------------

inline nlohmann::json fit_result_json(const FitResult& r) {
  nlohmann::json params = nlohmann::json::object();
  for (std::size_t i = 0; i < r.param_names.size(); ++i) params[r.param_names[i]] = r.params[i];
  return nlohmann::json{{"chi2_min", r.chi2_min},
                        {"params", params},
                        {"dof", r.dof},
                        {"probability", r.probability},
                        {"boundary_warning", r.boundary_warning}};
}

inline FitSpec parse_fit_spec(const nlohmann::json& j) {
  FitSpec spec;
  try {
    spec = default_fit_spec(theory_family_from_string(j.at("family").get<std::string>()));
    if (j.contains("temperature_K")) spec.temperature_K = j.at("temperature_K").get<double>();
    if (j.contains("radius_m")) spec.radius_m = j.at("radius_m").get<double>();
    if (j.contains("omega_p_eV")) spec.omega_p_eV = j.at("omega_p_eV").get<double>();
    if (j.contains("gamma_eV")) spec.gamma_eV = j.at("gamma_eV").get<double>();
    if (j.contains("error_model")) {
      const std::string m = j.at("error_model").get<std::string>();
      if (m == "effective-variance") spec.error_model = ErrorModel::effective_variance;
      else if (m != "value-sigma") throw ConfigError("error_model must be value-sigma|effective-variance");
    }
    if (j.contains("params")) {
      std::vector<ParamSpec> params;
      for (const auto& pj : j.at("params")) {
        params.push_back({pj.at("name").get<std::string>(), pj.at("lower").get<double>(),
                          pj.at("upper").get<double>()});
      }
      spec.free_params = std::move(params);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("fit spec json: ") + e.what());
  }
  return spec;
}

inline FitSpec load_fit_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fit spec: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_fit_spec(j);
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace casimir::io
