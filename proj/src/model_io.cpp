#include "manialign/model_io.hpp"

#include "manialign/error.hpp"

#include <fstream>
#include <sstream>

namespace manialign::io {

namespace {

constexpr const char* kModule = "model_io";

nlohmann::json kernel_to_json(const kernels::KernelSpec& s) {
  nlohmann::json j;
  j["kind"] = kernels::to_string(s.kind);
  if (s.bandwidth) {
    j["bandwidth"] = *s.bandwidth;
  } else {
    j["bandwidth"] = nullptr;
  }
  return j;
}

kernels::KernelSpec kernel_from_json(const nlohmann::json& j) {
  kernels::KernelSpec s;
  s.kind = kernels::kernel_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("bandwidth") && !j.at("bandwidth").is_null()) s.bandwidth = j.at("bandwidth").get<double>();
  return s;
}

}  // namespace

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json data = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  if (static_cast<Index>(data.size()) != rows * cols) {
    throw Error(ErrorKind::DimensionMismatch, kModule, "matrix data length does not match rows*cols");
  }
  Matrix m(rows, cols);
  std::size_t t = 0;
  for (Index i = 0; i < rows; ++i)
    for (Index c = 0; c < cols; ++c) m(i, c) = data[t++].get<double>();
  return m;
}

nlohmann::json model_to_json(const alignment::AlignmentModel& model) {
  nlohmann::json j;
  j["version"] = kModelVersion;
  j["mode"] = alignment::to_string(model.mode);
  j["mu"] = model.mu;
  j["mu_on"] = alignment::to_string(model.mu_on);
  j["p"] = model.p;
  j["scale_by_sqrt_lambda"] = model.scale_by_sqrt_lambda;
  j["eigenvalues"] = std::vector<double>(model.eigenvalues.data(), model.eigenvalues.data() + model.eigenvalues.size());

  nlohmann::json specs = nlohmann::json::array();
  for (const auto& s : model.kernel_specs) specs.push_back(kernel_to_json(s));
  j["kernel_specs"] = specs;

  nlohmann::json domains = nlohmann::json::array();
  for (std::size_t m = 0; m < model.num_domains(); ++m) {
    nlohmann::json d;
    d["domain"] = m;
    d["dim"] = model.domain_dims[m];
    d["projector"] = matrix_to_json(model.projectors[m]);
    if (model.mode == alignment::Mode::DualKema) d["samples"] = matrix_to_json(model.stored_samples[m]);
    domains.push_back(std::move(d));
  }
  j["domains"] = domains;

  const auto& md = model.metadata;
  j["metadata"] = {{"k", md.k},
                   {"graph_source", md.graph_source},
                   {"ridge", md.ridge},
                   {"kernel_reg", md.kernel_reg},
                   {"rank_deficiency", md.rank_deficiency},
                   {"sim_edges", md.sim_edges},
                   {"dis_edges", md.dis_edges},
                   {"ignored_tie_objects", md.ignored_tie_objects},
                   {"rbf_convention", md.rbf_convention}};
  return j;
}

alignment::AlignmentModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<std::string>() != kModelVersion) {
      throw Error(ErrorKind::Io, kModule, "unsupported model version '" + j.at("version").get<std::string>() + "'");
    }
    alignment::AlignmentModel model;
    model.mode = alignment::mode_from_string(j.at("mode").get<std::string>());
    model.mu = j.at("mu").get<double>();
    model.mu_on = alignment::mu_placement_from_string(j.at("mu_on").get<std::string>());
    model.p = j.at("p").get<std::size_t>();
    model.scale_by_sqrt_lambda = j.at("scale_by_sqrt_lambda").get<bool>();
    const auto ev = j.at("eigenvalues").get<std::vector<double>>();
    model.eigenvalues = Eigen::Map<const Vector>(ev.data(), static_cast<Index>(ev.size()));
    for (const auto& s : j.at("kernel_specs")) model.kernel_specs.push_back(kernel_from_json(s));
    for (const auto& d : j.at("domains")) {
      model.domain_dims.push_back(d.at("dim").get<std::size_t>());
      model.projectors.push_back(matrix_from_json(d.at("projector")));
      if (model.mode == alignment::Mode::DualKema) model.stored_samples.push_back(matrix_from_json(d.at("samples")));
    }
    if (model.mode == alignment::Mode::DualKema && model.kernel_specs.size() != model.projectors.size()) {
      throw Error(ErrorKind::Io, kModule, "dual model needs one kernel spec per domain");
    }
    for (const auto& p : model.projectors) {
      if (static_cast<std::size_t>(p.cols()) != model.p) {
        throw Error(ErrorKind::Io, kModule, "projector column count differs from p");
      }
    }
    if (j.contains("metadata")) {
      const auto& md = j.at("metadata");
      model.metadata.k = md.value("k", std::size_t{0});
      model.metadata.graph_source = md.value("graph_source", std::string{});
      model.metadata.ridge = md.value("ridge", 0.0);
      model.metadata.kernel_reg = md.value("kernel_reg", 0.0);
      model.metadata.rank_deficiency = md.value("rank_deficiency", std::size_t{0});
      model.metadata.sim_edges = md.value("sim_edges", std::size_t{0});
      model.metadata.dis_edges = md.value("dis_edges", std::size_t{0});
      model.metadata.ignored_tie_objects = md.value("ignored_tie_objects", std::vector<int>{});
      model.metadata.rbf_convention = md.value("rbf_convention", model.metadata.rbf_convention);
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, kModule, std::string("malformed model JSON: ") + e.what());
  }
}

void save_model(const alignment::AlignmentModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, kModule, "cannot write " + path.string());
  out << model_to_json(model).dump(2) << '\n';
}

alignment::AlignmentModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, kModule, "cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, kModule, "cannot parse " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace manialign::io
