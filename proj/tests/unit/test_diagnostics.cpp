// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <memory>

#include "mlmcmc/diagnostics.hpp"
#include "mlmcmc/hier_model.hpp"

using namespace mlmcmc;

namespace {

std::shared_ptr<HierModelConfig> seeded_config(std::uint64_t seed = 404) {
  auto cfg = std::make_shared<HierModelConfig>();
  RngStream stream = derive_stream(seed, StreamPurpose::kReplicateRoot, 0, 0);
  cfg->data = simulate_data(1.0, static_cast<std::size_t>(cfg->truncation(cfg->max_level)),
                            cfg->lambda, stream);
  return cfg;
}

// Toy one-dimensional kernels for the contraction checker.
class FixedMapKernel final : public IteratedMapKernel {
 public:
  enum class Kind { kIdentity, kConstantOfInnovation };
  FixedMapKernel(Kind kind, int level) : kind_(kind), level_(level) {
    layout_ = {InnovationSlot{InnovationKind::kUniform, 1, 0.0}};
  }
  int level() const override { return level_; }
  std::size_t state_dim() const override { return 1; }
  double resolution() const override { return std::pow(2.0, -(level_ + 1)); }
  const InnovationLayout& innovation_layout() const override { return layout_; }
  using IteratedMapKernel::apply;
  StateVector apply(const StateVector& x, RecordCursor& cursor) const override {
    const double u = cursor.uniform();
    if (kind_ == Kind::kIdentity) return {x[0]};
    return {u};
  }

 private:
  Kind kind_;
  int level_;
  InnovationLayout layout_;
};

MlModel fixed_map_model(FixedMapKernel::Kind kind) {
  MlModel m;
  m.id = "toy";
  m.max_level = 8;
  m.resolution = [](int level) { return std::pow(2.0, -(level + 1)); };
  m.kernel = [kind](int level) -> std::shared_ptr<const IteratedMapKernel> {
    return std::make_shared<FixedMapKernel>(kind, level);
  };
  m.phi = [](std::span<const double> x) { return x[0]; };
  m.initial_state = [](int) { return StateVector{0.0}; };
  m.state_box = [](int) { return std::vector<std::pair<double, double>>{{-1.0, 1.0}}; };
  return m;
}

}  // namespace

TEST_CASE("rate estimation raises on a degenerate (self-coupled) family") {
  const auto cfg = seeded_config();
  MlModel model = hier_ml_model(cfg);
  model.kernel = [cfg](int) -> std::shared_ptr<const IteratedMapKernel> {
    return std::make_shared<HierGibbsKernel>(cfg, 2);  // level-independent kernel
  };
  model.initial_state = [cfg](int) {
    StateVector x(static_cast<std::size_t>(cfg->truncation(2)) + 1, 0.0);
    x[0] = 1.0;
    return x;
  };
  CHECK_THROWS_WITH_AS(estimate_rates(model, 3, 100, 100, 4, 1),
                       doctest::Contains("degenerate"), std::runtime_error);
}

TEST_CASE("rate report carries its reproduction manifest") {
  const auto cfg = seeded_config();
  const MlModel model = hier_ml_model(cfg);
  const RateReport r = estimate_rates(model, 3, 300, 500, 4, 42);
  CHECK(r.master_seed == 42);
  CHECK(r.sweeps_per_level == 300);
  CHECK(r.level0_steps == 500);
  CHECK(r.reference_level == 4);
  CHECK(r.levels.size() == 3);
  CHECK(r.model_id == model.id);
  for (double v : r.variance) CHECK(v > 0.0);
}

TEST_CASE("contraction probe: identity map has ratio one, constant map zero") {
  const ContractionProbe id =
      check_contraction(fixed_map_model(FixedMapKernel::Kind::kIdentity), {1, 2}, 8, 5);
  for (double t : id.tau_hat) CHECK(t == 1.0);

  const ContractionProbe cst =
      check_contraction(fixed_map_model(FixedMapKernel::Kind::kConstantOfInnovation), {1, 2}, 8, 5);
  for (double t : cst.tau_hat) CHECK(t == 0.0);
}

TEST_CASE("Gibbs sweep collapses pairs that differ only in u") {
  const auto cfg = seeded_config();
  const HierGibbsKernel kernel(cfg, 2);
  RngStream s = derive_stream(6, StreamPurpose::kReplicateRoot, 2, 0);
  const InnovationRecord rec = kernel.draw_innovations(s);
  StateVector x(kernel.state_dim(), 0.0), y(kernel.state_dim(), 0.0);
  x[0] = y[0] = 0.8;  // same delta
  for (std::size_t j = 1; j < x.size(); ++j) {
    x[j] = 0.3;
    y[j] = -0.9;
  }
  // The u-block depends on delta only, and the new delta on the new u.
  CHECK(kernel.apply(x, rec) == kernel.apply(y, rec));
}

TEST_CASE("coupling-decay probe flags identical kernels as degenerate") {
  const auto cfg = seeded_config();
  MlModel model = hier_ml_model(cfg);
  model.kernel = [cfg](int) -> std::shared_ptr<const IteratedMapKernel> {
    return std::make_shared<HierGibbsKernel>(cfg, 2);
  };
  model.state_box = [cfg](int) {
    std::vector<std::pair<double, double>> box(static_cast<std::size_t>(cfg->truncation(2)) + 1,
                                               {-1.0, 1.0});
    box[0] = {0.25, 2.5};
    return box;
  };
  const CouplingDecayProbe probe = check_coupling_decay(model, 4, 5, 3);
  CHECK(probe.degenerate);
}

TEST_CASE("forced identical replicate streams reduce the MSE to the squared bias") {
  const auto cfg = seeded_config();
  const MlModel model = hier_ml_model(cfg);
  const auto oracle = [&](int level) { return posterior_oracle(*cfg, level); };
  MseSweepOptions opt;
  opt.threads = 1;
  opt.force_shared_replicate_streams = true;
  const MseCostReport rep = mse_cost_sweep(model, oracle, {0.02}, 10, 77, opt);

  const LevelAllocation a =
      allocate(0.02, opt.rates, model.resolution, 1.0, 1.0, 2, cfg->max_level);
  const MlEstimate one = ml_estimate(model, a, 77, 0);
  const double bias = one.value - oracle(a.max_level_used);
  REQUIRE(rep.rows[0].method == "ml");
  CHECK(rep.rows[0].mse == doctest::Approx(bias * bias).epsilon(1e-14));
}

TEST_CASE("planned multilevel cost quadruples when epsilon halves") {
  const auto cfg = seeded_config();
  const MlModel model = hier_ml_model(cfg);
  auto planned_cost = [&](double eps) {
    const LevelAllocation a =
        allocate(eps, RateConstants{}, model.resolution, 1.0, 1.0, 2, cfg->max_level);
    std::uint64_t c = static_cast<std::uint64_t>(a.samples[0]) *
                      static_cast<std::uint64_t>(cfg->truncation(0) + 1);
    for (int l = 1; l <= a.max_level_used; ++l)
      c += static_cast<std::uint64_t>(a.samples[static_cast<std::size_t>(l)]) *
           static_cast<std::uint64_t>(cfg->truncation(l) + cfg->truncation(l - 1) + 1);
    return static_cast<double>(c);
  };
  const double ratio = planned_cost(0.005) / planned_cost(0.01);
  CHECK(ratio >= 3.2);
  CHECK(ratio <= 4.8);
}
