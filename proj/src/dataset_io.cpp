#include "manialign/dataset_io.hpp"

#include "manialign/error.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace manialign::io {

namespace {

constexpr const char* kModule = "cli";
constexpr const char* kDatasetVersion = "manialign-dataset/1";

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::BadConfig, kModule, msg); }
[[noreturn]] void io_error(const std::string& msg) { throw Error(ErrorKind::Io, kModule, msg); }

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) io_error(where + ": cannot parse number '" + s + "'");
  return v;
}

int parse_int(const std::string& s, const std::string& where) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) io_error(where + ": cannot parse integer '" + s + "'");
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) config_error(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error("bad value for '" + key + "': " + e.what());
  }
}

kernels::KernelSpec parse_kernel(const json& j) {
  check_keys(j, {"kind", "bandwidth"}, "kernel");
  kernels::KernelSpec s;
  s.kind = kernels::kernel_kind_from_string(get_as<std::string>(j, "kind"));
  if (j.contains("bandwidth")) {
    const auto& b = j.at("bandwidth");
    if (b.is_string()) {
      if (b.get<std::string>() != "half_median") config_error("bandwidth must be a number or \"half_median\"");
    } else if (b.is_number()) {
      s.bandwidth = b.get<double>();
      if (!(*s.bandwidth > 0.0)) config_error("bandwidth must be positive");
    } else {
      config_error("bandwidth must be a number or \"half_median\"");
    }
  }
  return s;
}

json eval_to_json(const classify::EvalReport& r) {
  json j;
  j["overall_accuracy"] = r.overall_accuracy;
  j["kappa"] = r.kappa;
  j["classes"] = r.classes;
  j["confusion"] = r.confusion;
  json per = json::array();
  for (const auto& [dom, s] : r.per_domain)
    per.push_back({{"domain", dom}, {"overall_accuracy", s.overall_accuracy}, {"kappa", s.kappa}, {"count", s.count}});
  j["per_domain"] = per;
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) io_error("cannot format number");
  return {buf, ptr};
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_error("cannot write " + path.string());
  out << text;
  if (!out) io_error("write failed for " + path.string());
}

void write_domain_csv(const std::filesystem::path& path, const DomainDataset& d) {
  d.validate();
  std::string s;
  for (std::size_t c = 0; c < d.dim(); ++c) s += "f" + std::to_string(c + 1) + ",";
  s += "label,tie_object\n";
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (std::size_t c = 0; c < d.dim(); ++c) {
      s += format_double(d.features(static_cast<Index>(r), static_cast<Index>(c)));
      s += ',';
    }
    s += std::to_string(d.labels[r]) + "," + std::to_string(d.tie_object[r]) + "\n";
  }
  write_text(path, s);
}

DomainDataset read_domain_csv(const std::filesystem::path& path, int domain_id) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw Error(ErrorKind::EmptyDataset, kModule, path.string() + " is empty");
  const auto header = split_commas(lines.front());
  if (header.size() < 3 || header[header.size() - 2] != "label" || header.back() != "tie_object") {
    io_error(path.string() + ": header must be f1..fd,label,tie_object");
  }
  const std::size_t d = header.size() - 2;
  for (std::size_t c = 0; c < d; ++c)
    if (header[c] != "f" + std::to_string(c + 1)) io_error(path.string() + ": unexpected column '" + header[c] + "'");
  if (lines.size() == 1) throw Error(ErrorKind::EmptyDataset, kModule, path.string() + " has no samples");
  DomainDataset out;
  out.domain_id = domain_id;
  out.features.resize(static_cast<Index>(lines.size() - 1), static_cast<Index>(d));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string where = path.string() + ":" + std::to_string(r + 1);
    const auto cells = split_commas(lines[r]);
    if (cells.size() != d + 2) io_error(where + ": expected " + std::to_string(d + 2) + " columns");
    for (std::size_t c = 0; c < d; ++c)
      out.features(static_cast<Index>(r - 1), static_cast<Index>(c)) = parse_double(cells[c], where);
    out.labels.push_back(parse_int(cells[d], where));
    out.tie_object.push_back(parse_int(cells[d + 1], where));
  }
  out.validate();
  return out;
}

void write_dataset(const std::filesystem::path& dir, const synth::SynthOutput& out) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) io_error("cannot create " + dir.string());
  json manifest;
  manifest["version"] = kDatasetVersion;
  manifest["tie_objects"] = out.tie_objects;
  json doms = json::array();
  for (std::size_t m = 0; m < out.data.num_domains(); ++m) {
    const auto& d = out.data.domains[m];
    const std::string file = "domain" + std::to_string(m) + ".csv";
    write_domain_csv(dir / file, d);
    json e{{"file", file}, {"dim", d.dim()}};
    if (!d.band_tags.empty()) e["band_tags"] = d.band_tags;
    if (m < out.labels_hidden.size() && out.labels_hidden[m]) {
      const std::string truth = "domain" + std::to_string(m) + "_truth.csv";
      std::string s = "label\n";
      for (int l : out.truth[m]) s += std::to_string(l) + "\n";
      write_text(dir / truth, s);
      e["validation_labels"] = truth;
    }
    doms.push_back(e);
  }
  manifest["domains"] = doms;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

LoadedDataset read_dataset(const std::filesystem::path& manifest) {
  json j;
  try {
    j = json::parse(read_text(manifest));
  } catch (const json::exception& e) {
    io_error(manifest.string() + ": " + e.what());
  }
  const auto base = manifest.parent_path();
  LoadedDataset out;
  try {
    if (j.value("version", std::string(kDatasetVersion)) != kDatasetVersion) io_error("unsupported dataset version");
    int id = 0;
    for (const auto& e : j.at("domains")) {
      DomainDataset d = read_domain_csv(base / e.at("file").get<std::string>(), id);
      if (e.contains("dim") && e.at("dim").get<std::size_t>() != d.dim()) {
        throw Error(ErrorKind::DimensionMismatch, kModule, "manifest dim disagrees with " + e.at("file").get<std::string>());
      }
      if (e.contains("band_tags")) d.band_tags = e.at("band_tags").get<std::vector<std::string>>();
      d.validate();
      std::optional<std::vector<int>> truth;
      if (e.contains("validation_labels")) {
        const auto lines = read_lines(base / e.at("validation_labels").get<std::string>());
        std::vector<int> t;
        for (std::size_t r = 1; r < lines.size(); ++r) t.push_back(parse_int(lines[r], "validation labels"));
        if (t.size() != d.size()) throw Error(ErrorKind::LengthMismatch, kModule, "validation labels length differs");
        truth = std::move(t);
      }
      out.data.domains.push_back(std::move(d));
      out.validation_labels.push_back(std::move(truth));
      ++id;
    }
  } catch (const json::exception& e) {
    io_error(manifest.string() + ": " + e.what());
  }
  if (out.data.domains.empty()) throw Error(ErrorKind::EmptyDataset, kModule, "manifest lists no domains");
  return out;
}

void write_latent_csv(const std::filesystem::path& path, const Matrix& z) {
  std::string s;
  for (Index c = 0; c < z.cols(); ++c) s += (c ? ",z" : "z") + std::to_string(c + 1);
  s += "\n";
  for (Index r = 0; r < z.rows(); ++r) {
    for (Index c = 0; c < z.cols(); ++c) {
      if (c) s += ',';
      s += format_double(z(r, c));
    }
    s += "\n";
  }
  write_text(path, s);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 2) throw Error(ErrorKind::EmptyDataset, kModule, path.string() + " has no rows");
  const std::size_t d = split_commas(lines.front()).size();
  Matrix out(static_cast<Index>(lines.size() - 1), static_cast<Index>(d));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_commas(lines[r]);
    if (cells.size() != d) io_error(path.string() + ": ragged row " + std::to_string(r + 1));
    for (std::size_t c = 0; c < d; ++c)
      out(static_cast<Index>(r - 1), static_cast<Index>(c)) = parse_double(cells[c], path.string());
  }
  return out;
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"mode", "mu", "mu_on", "k", "kernel", "kernels", "p", "cv", "labeled_per_class", "unlabeled",
              "test_fraction", "tie_dis_weight", "graph_source", "within_domain_pairs", "scale_by_sqrt_lambda",
              "ridge", "kernel_reg", "seed", "leading_domain", "standardize", "train_on", "methods", "hm_bins",
              "kcca_eps"},
             "config");
  RunConfig rc;
  rc.experiment.grid = protocol::default_grid();
  rc.experiment.labeled_per_class = {20, 5};
  rc.experiment.methods = {protocol::Method::KemaRbf};
  auto& f = rc.fit;
  auto& e = rc.experiment;
  if (j.contains("mode")) f.mode = alignment::mode_from_string(get_as<std::string>(j, "mode"));
  if (j.contains("mu")) f.mu = get_as<double>(j, "mu");
  if (j.contains("mu_on")) f.solve.mu_on = alignment::mu_placement_from_string(get_as<std::string>(j, "mu_on"));
  if (j.contains("k")) f.k = get_as<std::size_t>(j, "k");
  if (j.contains("kernel") && j.contains("kernels")) config_error("give either 'kernel' or 'kernels'");
  if (j.contains("kernel")) f.kernels = {parse_kernel(j.at("kernel"))};
  if (j.contains("kernels")) {
    if (!j.at("kernels").is_array()) config_error("'kernels' must be an array");
    for (const auto& k : j.at("kernels")) f.kernels.push_back(parse_kernel(k));
  }
  if (j.contains("p")) {
    f.p = get_as<std::size_t>(j, "p");
    if (*f.p == 0) config_error("p must be positive");
  }
  if (j.contains("cv")) {
    const auto& cv = j.at("cv");
    check_keys(cv, {"p_list", "C_list", "sigma_list", "folds"}, "cv");
    if (cv.contains("p_list")) e.grid.p_values = get_as<std::vector<std::size_t>>(cv, "p_list");
    if (cv.contains("C_list")) e.grid.c_values = get_as<std::vector<double>>(cv, "C_list");
    if (cv.contains("sigma_list")) e.grid.sigma_values = get_as<std::vector<double>>(cv, "sigma_list");
    if (cv.contains("folds")) e.folds = get_as<std::size_t>(cv, "folds");
  }
  if (j.contains("labeled_per_class")) {
    const auto& l = j.at("labeled_per_class");
    e.labeled_per_class = l.is_array() ? get_as<std::vector<std::size_t>>(j, "labeled_per_class")
                                       : std::vector<std::size_t>{get_as<std::size_t>(j, "labeled_per_class")};
  }
  if (j.contains("unlabeled")) e.unlabeled_per_domain = get_as<std::size_t>(j, "unlabeled");
  if (j.contains("test_fraction")) e.test_fraction = get_as<double>(j, "test_fraction");
  if (j.contains("tie_dis_weight")) f.tie_dis_weight = get_as<double>(j, "tie_dis_weight");
  if (j.contains("graph_source")) f.graph_source = alignment::graph_source_from_string(get_as<std::string>(j, "graph_source"));
  if (j.contains("within_domain_pairs")) f.within_domain_pairs = get_as<bool>(j, "within_domain_pairs");
  if (j.contains("scale_by_sqrt_lambda")) f.solve.scale_by_sqrt_lambda = get_as<bool>(j, "scale_by_sqrt_lambda");
  if (j.contains("ridge")) f.solve.ridge = get_as<double>(j, "ridge");
  if (j.contains("kernel_reg")) f.solve.kernel_reg = get_as<double>(j, "kernel_reg");
  if (j.contains("seed")) {
    f.seed = get_as<std::uint64_t>(j, "seed");
    e.seed = f.seed;
  }
  if (j.contains("leading_domain")) e.leading_domain = get_as<std::size_t>(j, "leading_domain");
  if (j.contains("standardize")) e.standardize = get_as<bool>(j, "standardize");
  if (j.contains("train_on")) {
    const auto t = get_as<std::string>(j, "train_on");
    if (t == "pooled") {
      e.train_on = protocol::TrainOn::Pooled;
    } else if (t == "source") {
      e.train_on = protocol::TrainOn::SourceOnly;
    } else {
      config_error("train_on must be \"pooled\" or \"source\"");
    }
  }
  if (j.contains("methods")) {
    e.methods.clear();
    for (const auto& m : get_as<std::vector<std::string>>(j, "methods")) e.methods.push_back(protocol::method_from_string(m));
  }
  if (j.contains("hm_bins")) e.hm_bins = get_as<std::size_t>(j, "hm_bins");
  if (j.contains("kcca_eps")) e.kcca_eps = get_as<double>(j, "kcca_eps");

  if (f.k == 0) config_error("k must be positive");
  if (!(f.mu >= 0.0)) config_error("mu must be non-negative");
  if (!(f.tie_dis_weight > 0.0)) config_error("tie_dis_weight must be positive");
  if (f.solve.ridge && !(*f.solve.ridge >= 0.0)) config_error("ridge must be non-negative");
  if (!(f.solve.kernel_reg >= 0.0)) config_error("kernel_reg must be non-negative");
  e.fit = f;
  e.validate();
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(read_text(path)); }

std::string report_to_json(const classify::EvalReport& r, int indent) { return eval_to_json(r).dump(indent) + "\n"; }

std::string experiment_to_json(const protocol::ExperimentResult& r, std::size_t reps, int indent) {
  json j;
  j["repetitions"] = reps;
  json ms = json::array();
  for (const auto& s : r.methods) {
    ms.push_back({{"method", protocol::to_string(s.method)},
                  {"transfer_oa_mean", s.mean_oa},
                  {"transfer_oa_std", s.std_oa},
                  {"transfer_kappa_mean", s.mean_kappa},
                  {"transfer_kappa_std", s.std_kappa},
                  {"transfer_oa_per_rep", s.oa_per_rep},
                  {"curve_mean", s.curve_mean},
                  {"curve_std", s.curve_std}});
  }
  j["methods"] = ms;
  return j.dump(indent) + "\n";
}

}  // namespace manialign::io
