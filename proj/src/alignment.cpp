#include "manialign/alignment.hpp"

#include "manialign/eigsolve.hpp"
#include "manialign/error.hpp"
#include "manialign/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace manialign::alignment {

namespace {

constexpr const char* kModule = "alignment";

Matrix numerator_middle(const graphs::LaplacianTriple& lap, MuPlacement mu_on) {
  if (mu_on == MuPlacement::Geo) return lap.mu * lap.geo.dense() + lap.sim.dense();
  return lap.geo.dense() + lap.mu * lap.sim.dense();
}

void check_laplacian_order(const graphs::LaplacianTriple& lap, std::size_t n) {
  const auto order = static_cast<Index>(n);
  if (lap.geo.order() != order || lap.sim.order() != order || lap.dis.order() != order) {
    throw Error(ErrorKind::OrderMismatch, kModule,
                "Laplacians must have order " + std::to_string(n) + " (total sample count)");
  }
  if (!(lap.mu > 0.0) || !std::isfinite(lap.mu)) {
    throw Error(ErrorKind::BadConfig, kModule, "mu must be positive");
  }
}

eigsolve::EigenSolution solve(const SymMatrix& a, const SymMatrix& b, std::optional<std::size_t> p,
                              std::size_t order, const SolveOptions& opts) {
  if (b.dense().norm() == 0.0) {
    throw Error(ErrorKind::DegenerateDIS, kModule,
                "dissimilarity matrix is zero; labels or ties provide no different-class pairs");
  }
  if (p) {
    if (*p > order) {
      throw Error(ErrorKind::DimensionMismatch, kModule,
                  "p = " + std::to_string(*p) + " exceeds problem order " + std::to_string(order));
    }
    return eigsolve::solve_gep(a, b, *p, opts.ridge);
  }
  return eigsolve::solve_gep_at_most(a, b, std::min(order, kDefaultMaxDims), opts.ridge);
}

void scale_columns(Matrix& v, const Vector& lambda) {
  for (Index j = 0; j < v.cols(); ++j) v.col(j) *= std::sqrt(std::max(lambda(j), 0.0));
}

}  // namespace

std::string to_string(Mode m) { return m == Mode::PrimalSsma ? "primal_ssma" : "dual_kema"; }

Mode mode_from_string(const std::string& s) {
  if (s == "primal_ssma" || s == "ssma" || s == "primal") return Mode::PrimalSsma;
  if (s == "dual_kema" || s == "kema" || s == "dual") return Mode::DualKema;
  throw Error(ErrorKind::BadConfig, kModule, "unknown mode '" + s + "'");
}

std::string to_string(MuPlacement m) { return m == MuPlacement::Geo ? "geo" : "sim"; }

MuPlacement mu_placement_from_string(const std::string& s) {
  if (s == "geo") return MuPlacement::Geo;
  if (s == "sim") return MuPlacement::Sim;
  throw Error(ErrorKind::BadConfig, kModule, "mu_on must be 'geo' or 'sim', got '" + s + "'");
}

std::string to_string(GraphSource g) {
  switch (g) {
    case GraphSource::Auto: return "auto";
    case GraphSource::Labels: return "labels";
    case GraphSource::Ties: return "ties";
  }
  return "auto";
}

GraphSource graph_source_from_string(const std::string& s) {
  if (s == "auto") return GraphSource::Auto;
  if (s == "labels") return GraphSource::Labels;
  if (s == "ties") return GraphSource::Ties;
  throw Error(ErrorKind::BadConfig, kModule, "graph_source must be auto, labels or ties");
}

AlignmentModel fit_ssma(const MultiDomainCollection& data, const graphs::LaplacianTriple& lap,
                        std::optional<std::size_t> p, const SolveOptions& opts) {
  data.validate(2);
  const std::size_t n = data.total_samples();
  const std::size_t d = data.total_features();
  check_laplacian_order(lap, n);

  const Matrix xt = data.block_data_matrix().transpose();  // n x d
  const SymMatrix a(parallel::congruence(xt, numerator_middle(lap, opts.mu_on)));
  const SymMatrix b(parallel::congruence(xt, lap.dis.dense()));
  const auto sol = solve(a, b, p, d, opts);

  AlignmentModel model;
  model.mode = Mode::PrimalSsma;
  model.mu = lap.mu;
  model.mu_on = opts.mu_on;
  model.scale_by_sqrt_lambda = opts.scale_by_sqrt_lambda;
  model.p = static_cast<std::size_t>(sol.eigenvalues.size());
  model.eigenvalues = sol.eigenvalues;
  model.metadata.ridge = opts.ridge.value_or(eigsolve::default_ridge(b));
  model.metadata.rank_deficiency = sol.rank_deficiency_count;

  Matrix v = sol.eigenvectors;
  if (opts.scale_by_sqrt_lambda) scale_columns(v, sol.eigenvalues);
  for (std::size_t m = 0; m < data.num_domains(); ++m) {
    const auto off = static_cast<Index>(data.feature_offset(m));
    const auto dm = static_cast<Index>(data.domains[m].dim());
    model.projectors.push_back(v.middleRows(off, dm));
    model.domain_dims.push_back(data.domains[m].dim());
  }
  return model;
}

AlignmentModel fit_kema(const MultiDomainCollection& data, const graphs::LaplacianTriple& lap,
                        const kernels::BlockKernel& kernel, std::optional<std::size_t> p,
                        const SolveOptions& opts) {
  data.validate(2);
  const std::size_t n = data.total_samples();
  check_laplacian_order(lap, n);
  if (kernel.assembled.order() != static_cast<Index>(n) || kernel.per_domain.size() != data.num_domains() ||
      kernel.specs.size() != data.num_domains()) {
    throw Error(ErrorKind::OrderMismatch, kModule, "kernel blocks do not follow the collection's sample ordering");
  }
  for (std::size_t m = 0; m < data.num_domains(); ++m) {
    if (kernel.per_domain[m].rows() != static_cast<Index>(data.domains[m].size())) {
      throw Error(ErrorKind::OrderMismatch, kModule, "kernel block " + std::to_string(m) + " has the wrong order");
    }
  }
  if (!(opts.kernel_reg >= 0.0)) throw Error(ErrorKind::BadConfig, kModule, "kernel_reg must be >= 0");

  const Matrix& k = kernel.assembled.dense();
  Matrix a_dense = parallel::congruence(k, numerator_middle(lap, opts.mu_on));
  if (opts.kernel_reg > 0.0) {
    const double level = a_dense.diagonal().mean();
    a_dense.diagonal().array() += opts.kernel_reg * level;
  }
  const SymMatrix a(a_dense);
  const SymMatrix b(parallel::congruence(k, lap.dis.dense()));
  const auto sol = solve(a, b, p, n, opts);

  AlignmentModel model;
  model.mode = Mode::DualKema;
  model.mu = lap.mu;
  model.mu_on = opts.mu_on;
  model.scale_by_sqrt_lambda = opts.scale_by_sqrt_lambda;
  model.p = static_cast<std::size_t>(sol.eigenvalues.size());
  model.eigenvalues = sol.eigenvalues;
  model.kernel_specs = kernel.specs;
  model.metadata.ridge = opts.ridge.value_or(eigsolve::default_ridge(b));
  model.metadata.kernel_reg = opts.kernel_reg;
  model.metadata.rank_deficiency = sol.rank_deficiency_count;

  Matrix v = sol.eigenvectors;
  if (opts.scale_by_sqrt_lambda) scale_columns(v, sol.eigenvalues);
  for (std::size_t m = 0; m < data.num_domains(); ++m) {
    const auto off = static_cast<Index>(data.sample_offset(m));
    const auto nm = static_cast<Index>(data.domains[m].size());
    model.projectors.push_back(v.middleRows(off, nm));
    model.stored_samples.push_back(data.domains[m].features);
    model.domain_dims.push_back(data.domains[m].dim());
  }
  return model;
}

LatentData transform(const AlignmentModel& model, std::size_t domain, const Matrix& x,
                     std::optional<std::size_t> p) {
  if (domain >= model.num_domains()) {
    throw Error(ErrorKind::UnknownDomain, kModule,
                "domain " + std::to_string(domain) + " not in a " + std::to_string(model.num_domains()) +
                    "-domain model");
  }
  const std::size_t dims = p.value_or(model.p);
  if (dims > model.p) {
    throw Error(ErrorKind::DimensionMismatch, kModule,
                "requested " + std::to_string(dims) + " latent dimensions from a p = " + std::to_string(model.p) +
                    " model");
  }
  if (static_cast<std::size_t>(x.cols()) != model.domain_dims[domain]) {
    throw Error(ErrorKind::DimensionMismatch, kModule,
                "domain " + std::to_string(domain) + " expects " + std::to_string(model.domain_dims[domain]) +
                    " features, got " + std::to_string(x.cols()));
  }
  LatentData out;
  out.p = dims;
  out.domain_of.assign(static_cast<std::size_t>(x.rows()), domain);
  const auto cols = static_cast<Index>(dims);
  const Matrix& proj = model.projectors[domain];
  if (model.mode == Mode::PrimalSsma) {
    out.coordinates = x * proj.leftCols(cols);
  } else {
    const Matrix kx = kernels::gram(x, model.stored_samples[domain], model.kernel_specs[domain]);
    out.coordinates = kx * proj.leftCols(cols);
  }
  return out;
}

LatentData transform_all(const AlignmentModel& model, const MultiDomainCollection& data,
                         std::optional<std::size_t> p) {
  if (data.num_domains() != model.num_domains()) {
    throw Error(ErrorKind::UnknownDomain, kModule, "collection and model disagree on the number of domains");
  }
  LatentData out;
  out.p = p.value_or(model.p);
  out.coordinates.resize(static_cast<Index>(data.total_samples()), static_cast<Index>(out.p));
  Index row = 0;
  for (std::size_t m = 0; m < data.num_domains(); ++m) {
    if (data.domains[m].size() == 0) continue;
    LatentData part = transform(model, m, data.domains[m].features, out.p);
    out.coordinates.middleRows(row, part.coordinates.rows()) = part.coordinates;
    out.domain_of.insert(out.domain_of.end(), part.domain_of.begin(), part.domain_of.end());
    row += part.coordinates.rows();
  }
  return out;
}

graphs::LaplacianTriple build_laplacians(const MultiDomainCollection& data, const FitConfig& config,
                                         FitMetadata* meta) {
  const std::size_t n = data.total_samples();
  std::vector<graphs::SparseSym> geo;
  geo.reserve(data.num_domains());
  for (const auto& dom : data.domains) geo.push_back(graphs::knn_graph(dom.features, config.k));

  GraphSource source = config.graph_source;
  if (source == GraphSource::Auto) source = data.has_ties() ? GraphSource::Ties : GraphSource::Labels;

  graphs::LaplacianTriple lap;
  lap.mu = config.mu;
  lap.geo = graphs::assemble_block_geo(geo, n);
  std::vector<int> ignored;
  if (source == GraphSource::Ties) {
    auto tg = graphs::tie_graphs(data.tie_objects(), data.domain_of(), data.labels(), config.tie_dis_weight);
    lap.sim = graphs::laplacian(tg.sim);
    lap.dis = graphs::laplacian(tg.dis);
    if (meta) {
      meta->sim_edges = tg.sim.edge_count();
      meta->dis_edges = tg.dis.edge_count();
    }
    ignored = std::move(tg.ignored_objects);
  } else {
    auto lg = graphs::label_graphs(data.labels(), data.domain_of(), config.within_domain_pairs);
    lap.sim = graphs::laplacian(lg.sim);
    lap.dis = graphs::laplacian(lg.dis);
    if (meta) {
      meta->sim_edges = lg.sim.edge_count();
      meta->dis_edges = lg.dis.edge_count();
    }
  }
  if (meta) {
    meta->k = config.k;
    meta->graph_source = to_string(source);
    meta->ignored_tie_objects = std::move(ignored);
  }
  return lap;
}

std::vector<kernels::KernelSpec> resolve_kernels(const MultiDomainCollection& data, const FitConfig& config) {
  const std::size_t m_count = data.num_domains();
  std::vector<kernels::KernelSpec> specs;
  if (config.kernels.empty()) {
    specs.assign(m_count, kernels::KernelSpec::rbf_half_median());
  } else if (config.kernels.size() == 1) {
    specs.assign(m_count, config.kernels.front());
  } else if (config.kernels.size() == m_count) {
    specs = config.kernels;
  } else {
    throw Error(ErrorKind::BadConfig, kModule,
                std::to_string(config.kernels.size()) + " kernel specs for " + std::to_string(m_count) + " domains");
  }
  for (std::size_t m = 0; m < m_count; ++m) {
    specs[m] = kernels::resolve(specs[m], data.domains[m].features, config.seed + m);
  }
  return specs;
}

AlignmentModel fit(const MultiDomainCollection& data, const FitConfig& config) {
  data.validate(2);
  FitMetadata meta;
  const auto lap = build_laplacians(data, config, &meta);
  AlignmentModel model;
  if (config.mode == Mode::PrimalSsma) {
    model = fit_ssma(data, lap, config.p, config.solve);
  } else {
    const auto specs = resolve_kernels(data, config);
    const auto kernel = kernels::assemble_block_kernel(data.feature_blocks(), specs);
    model = fit_kema(data, lap, kernel, config.p, config.solve);
  }
  meta.ridge = model.metadata.ridge;
  meta.kernel_reg = model.metadata.kernel_reg;
  meta.rank_deficiency = model.metadata.rank_deficiency;
  model.metadata = std::move(meta);
  return model;
}

}  // namespace manialign::alignment
