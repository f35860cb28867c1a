#include "sparsefact/serialize.hpp"

namespace sparsefact {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("config read: " + what);
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const char* where) {
  if (!j.is_object()) fail(std::string(where) + " must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) fail(std::string("unknown key '") + item.key() + "' in " + where);
  }
}

Index get_index(const Json& j, const char* key, const char* where) {
  if (!j.contains(key)) fail(std::string(where) + " missing '" + key + "'");
  const Json& v = j.at(key);
  if (!v.is_number_integer())
    fail(std::string("'") + key + "' in " + where + " must be an integer");
  return v.get<Index>();
}

std::pair<Index, Index> get_shape(const Json& j, const char* where) {
  if (!j.contains("shape")) fail(std::string(where) + " missing 'shape'");
  const Json& s = j.at("shape");
  if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() ||
      !s[1].is_number_integer())
    fail(std::string("'shape' in ") + where + " must be [rows, cols]");
  return {s[0].get<Index>(), s[1].get<Index>()};
}

}  // namespace

Json to_json(const ConstraintSet& set) {
  Json j;
  switch (set.kind()) {
    case ConstraintKind::GlobalSparseUnitNorm:
      j["type"] = "sp";
      j["p"] = set.budget();
      break;
    case ConstraintKind::ColumnSparse:
      j["type"] = "spcol";
      j["k"] = set.budget();
      break;
    case ConstraintKind::RowSparse:
      j["type"] = "sprow";
      j["k"] = set.budget();
      break;
    case ConstraintKind::RowColSparse:
      j["type"] = "splincol";
      j["k"] = set.budget();
      break;
    case ConstraintKind::Unconstrained:
      j["type"] = "none";
      break;
  }
  j["shape"] = {set.rows(), set.cols()};
  return j;
}

ConstraintSet constraint_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    fail("constraint needs a string 'type'");
  const std::string type = j.at("type").get<std::string>();
  const auto [rows, cols] = get_shape(j, "constraint");
  try {
    if (type == "sp") {
      check_keys(j, {"type", "p", "shape"}, "constraint");
      return ConstraintSet::global_sparse_unit_norm(
          rows, cols, get_index(j, "p", "constraint"));
    }
    if (type == "spcol") {
      check_keys(j, {"type", "k", "shape"}, "constraint");
      return ConstraintSet::column_sparse(rows, cols,
                                          get_index(j, "k", "constraint"));
    }
    if (type == "sprow") {
      check_keys(j, {"type", "k", "shape"}, "constraint");
      return ConstraintSet::row_sparse(rows, cols,
                                       get_index(j, "k", "constraint"));
    }
    if (type == "splincol") {
      check_keys(j, {"type", "k", "shape"}, "constraint");
      return ConstraintSet::row_col_sparse(rows, cols,
                                           get_index(j, "k", "constraint"));
    }
    if (type == "none") {
      check_keys(j, {"type", "shape"}, "constraint");
      return ConstraintSet::unconstrained(rows, cols);
    }
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  fail("unknown constraint type '" + type + "'");
}

Json to_json(const PalmConfig& cfg) {
  return Json{{"max_iter", cfg.max_iter},
              {"obj_tol", cfg.obj_tol},
              {"step_margin", cfg.step_margin},
              {"spectral_tol", cfg.spectral_tol},
              {"min_modulus", cfg.min_modulus}};
}

PalmConfig palm_config_from_json(const Json& j) {
  check_keys(j, {"max_iter", "obj_tol", "step_margin", "spectral_tol",
                 "min_modulus"},
             "palm config");
  PalmConfig cfg;
  if (j.contains("max_iter")) {
    if (!j.at("max_iter").is_number_integer())
      fail("'max_iter' must be an integer");
    cfg.max_iter = j.at("max_iter").get<int>();
  }
  auto get_pos = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) fail(std::string("'") + key + "' must be a number");
    out = j.at(key).get<double>();
    if (!(out > 0.0)) fail(std::string("'") + key + "' must be positive");
  };
  get_pos("obj_tol", cfg.obj_tol);
  get_pos("step_margin", cfg.step_margin);
  get_pos("spectral_tol", cfg.spectral_tol);
  get_pos("min_modulus", cfg.min_modulus);
  if (cfg.max_iter < 1) fail("'max_iter' must be positive");
  return cfg;
}

Json to_json(const SplitSchedule& schedule) {
  Json splits = Json::array();
  for (const SplitStep& s : schedule.steps)
    splits.push_back(
        Json{{"peeled", to_json(s.peeled)}, {"residual", to_json(s.residual)}});
  return Json{{"side", schedule.side == SplitSide::FromLeft ? "left" : "right"},
              {"splits", splits}};
}

SplitSchedule schedule_from_json(const Json& j) {
  check_keys(j, {"side", "splits"}, "schedule");
  SplitSchedule out;
  if (!j.contains("side") || !j.at("side").is_string())
    fail("schedule needs a string 'side'");
  const std::string side = j.at("side").get<std::string>();
  if (side == "left")
    out.side = SplitSide::FromLeft;
  else if (side == "right")
    out.side = SplitSide::FromRight;
  else
    fail("schedule side must be 'left' or 'right'");
  if (!j.contains("splits") || !j.at("splits").is_array() ||
      j.at("splits").empty())
    fail("schedule needs a non-empty 'splits' array");
  for (const Json& s : j.at("splits")) {
    check_keys(s, {"peeled", "residual"}, "split");
    if (!s.contains("peeled") || !s.contains("residual"))
      fail("split needs 'peeled' and 'residual'");
    out.steps.push_back({constraint_from_json(s.at("peeled")),
                         constraint_from_json(s.at("residual"))});
  }
  return out;
}

Json to_json(const CooMatrix& m) {
  Json triplets = Json::array();
  for (const Triplet& t : m.triplets())
    triplets.push_back(Json::array({t.row, t.col, t.value}));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"triplets", triplets}};
}

CooMatrix coo_from_json(const Json& j) {
  check_keys(j, {"rows", "cols", "triplets"}, "matrix");
  const Index rows = get_index(j, "rows", "matrix");
  const Index cols = get_index(j, "cols", "matrix");
  if (!j.contains("triplets") || !j.at("triplets").is_array())
    fail("matrix needs a 'triplets' array");
  std::vector<Triplet> ts;
  for (const Json& t : j.at("triplets")) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() ||
        !t[1].is_number_integer() || !t[2].is_number())
      fail("triplet must be [row, col, value]");
    ts.push_back({t[0].get<Index>(), t[1].get<Index>(), t[2].get<double>()});
  }
  try {
    return CooMatrix(rows, cols, std::move(ts));
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

Json to_json(const FactorizationReport& rep) {
  Json factors = Json::array();
  for (const CooMatrix& f : rep.op.factors) factors.push_back(to_json(f));
  return Json{{"format_version", kFormatVersion},
              {"scale", rep.op.scale},
              {"factors", factors},
              {"rmse", rep.rmse_value},
              {"rc", rep.rc},
              {"split_traces", rep.split_traces},
              {"pre_global_objectives", rep.pre_global_objectives},
              {"global_traces", rep.global_traces},
              {"seed", rep.seed},
              {"config", to_json(rep.config)},
              {"wall_ms", rep.wall_ms}};
}

ScheduleFile schedule_file_from_json(const Json& j) {
  check_keys(j, {"format_version", "side", "splits", "palm", "rc_dict_factors"},
             "schedule file");
  if (!j.contains("format_version") ||
      !j.at("format_version").is_number_integer() ||
      j.at("format_version").get<int>() != kFormatVersion)
    fail("schedule file needs format_version " + std::to_string(kFormatVersion));
  ScheduleFile out;
  Json core;
  core["side"] = j.contains("side") ? j.at("side") : Json();
  core["splits"] = j.contains("splits") ? j.at("splits") : Json();
  out.schedule = schedule_from_json(core);
  if (j.contains("palm")) out.palm = palm_config_from_json(j.at("palm"));
  if (j.contains("rc_dict_factors")) {
    if (!j.at("rc_dict_factors").is_number_integer())
      fail("'rc_dict_factors' must be an integer");
    out.rc_dict_factors = j.at("rc_dict_factors").get<Index>();
  }
  return out;
}

}  // namespace sparsefact
