#include "fixtures.hpp"
#include "gradcheck.hpp"

#include "urbanembed/data/generator.hpp"
#include "urbanembed/error.hpp"
#include "urbanembed/train/checkpoint.hpp"
#include "urbanembed/train/losses.hpp"
#include "urbanembed/train/model.hpp"
#include "urbanembed/train/trainer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace urbanembed;
using urbanembed::testing::calibration;
using urbanembed::testing::max_abs_diff;
using urbanembed::testing::oracles;
using urbanembed::testing::TempDir;
using urbanembed::testing::to_matrix;

namespace {

TrainConfig small_config() {
  TrainConfig c;
  c.dim = 8;
  c.heads = 2;
  c.memory = 4;
  c.epochs = 5;
  return c;
}

Dataset small_city() {
  CityConfig c;
  c.n_regions = 8;
  c.n_districts = 2;
  c.n_trips = 200;
  return generate_city(c);
}

}  // namespace

TEST(Losses, OdDistributionsMatchOracle) {
  const auto& o = oracles()["od"];
  const auto d = od_distributions(to_matrix(o["origin"]), to_matrix(o["destination"]));
  EXPECT_LT(max_abs_diff(d.origin, to_matrix(o["expected_origin"])), 1e-12);
  EXPECT_LT(max_abs_diff(d.destination, to_matrix(o["expected_destination"])), 1e-12);
  TripSet trips;
  for (const auto& t : o["trips"]) trips.trips.push_back({t[0].get<std::size_t>(), t[1].get<std::size_t>()});
  EXPECT_NEAR(loss_odp(d.origin, d.destination, trips), o["expected_loss"].get<double>(), 1e-9);

  // The tape form weights by the trip-count matrix and must agree.
  Tape tape;
  auto dv = od_distributions(tape.constant(to_matrix(o["origin"])), tape.constant(to_matrix(o["destination"])));
  EXPECT_NEAR(loss_odp(dv, trip_counts(trips, 3)).scalar(), o["expected_loss"].get<double>(), 1e-9);
}

TEST(Losses, ReconstructionMatchesOracle) {
  const auto& o = oracles()["reconstruction"];
  EXPECT_NEAR(loss_reconstruction(to_matrix(o["embedding"]), to_matrix(o["target"])), o["expected"].get<double>(),
              1e-12);
  EXPECT_THROW(loss_reconstruction(Matrix::Zero(2, 1), Matrix::Zero(3, 3)), std::invalid_argument);
}

TEST(Losses, ZeroEmbeddingsGiveUniformOd) {
  const std::size_t n = 5;
  const auto d = od_distributions(Matrix::Zero(5, 3), Matrix::Zero(5, 3));
  TripSet trips;
  for (std::size_t k = 0; k < 7; ++k) trips.trips.push_back({k % n, (k * 3) % n});
  EXPECT_NEAR(loss_odp(d.origin, d.destination, trips), 2.0 * 7.0 * std::log(5.0), 1e-12);
  EXPECT_EQ(loss_reconstruction(Matrix::Zero(2, 3), Matrix::Identity(2, 2)), 2.0);
}

TEST(Losses, TotalNamesNonFiniteComponent) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(total_loss({1.0, 2.0, 3.5}), 6.5);
  try {
    total_loss({1.0, nan, 1.0});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("L_FP"), std::string::npos);
  }
  EXPECT_THROW(total_loss({std::numeric_limits<double>::infinity(), 0, 0}), NumericalError);
}

TEST(Losses, ArgmaxAccuracy) {
  Matrix p(2, 2);
  p << 0.9, 0.1, 0.5, 0.5;
  TripSet trips;
  trips.trips = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_DOUBLE_EQ(od_argmax_accuracy(p, trips), 0.5);
}

TEST(Model, ParameterInventory) {
  const TrainConfig c = small_config();
  const ParameterSet p = init_params(c, 6);
  EXPECT_TRUE(p.contains("threshold.O"));
  EXPECT_TRUE(p.contains("head.S.1"));
  EXPECT_TRUE(p.contains(param_names::kMemoryKeys));
  EXPECT_FALSE(p.contains(param_names::kQuery));
  EXPECT_EQ(p.matrix("proj.F").rows(), 6);
  EXPECT_EQ(p.matrix("proj.F").cols(), 8);
  EXPECT_EQ(p.matrix(param_names::kMemoryValues).rows(), 4);

  TrainConfig gcl = c;
  gcl.ablation = Ablation::NoGraphCleansing;
  for (const Parameter& q : init_params(gcl, 6).items()) EXPECT_EQ(q.name.find("threshold"), std::string::npos);
  TrainConfig afm = c;
  afm.ablation = Ablation::SelfAttentionFusion;
  const ParameterSet pa = init_params(afm, 6);
  EXPECT_TRUE(pa.contains(param_names::kQuery));
  EXPECT_FALSE(pa.contains(param_names::kMemoryKeys));
  TrainConfig dsgf = c;
  dsgf.ablation = Ablation::NoDualStageFusion;
  EXPECT_FALSE(init_params(dsgf, 6).contains(param_names::gate(View::Origin)));
}

TEST(Model, TotalIsSumOfComponents) {
  const Dataset d = small_city();
  const GraphSet g = build_graphs(d);
  for (bool normalize : {false, true}) {
    TrainConfig c = small_config();
    c.normalize_losses = normalize;
    Tape tape;
    const ForwardPass fp = forward(tape, init_params(c, d.n_regions()), g, d.trips.size(), c);
    EXPECT_NEAR(fp.total.scalar(), fp.odp.scalar() + fp.fp.scalar() + fp.sp.scalar(), 1e-9);
    if (normalize) {
      EXPECT_NEAR(fp.odp.scalar() * static_cast<double>(d.trips.size()), fp.raw_odp.scalar(), 1e-9);
    } else {
      EXPECT_EQ(fp.odp.scalar(), fp.raw_odp.scalar());
    }
    EXPECT_LT((fp.view_weights.value().rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
    EXPECT_EQ(fp.embedding().cols(), 32);
  }
}

TEST(Model, FullGradientMatchesFiniteDifferences) {
  const auto cmp = urbanembed::testing::full_model_gradcheck();
  EXPECT_TRUE(cmp.ok) << cmp.worst_parameter << " " << cmp.max_relative_error;
  EXPECT_GT(cmp.compared, 100u);
}

TEST(Model, AblationGradientsMatchFiniteDifferences) {
  for (Ablation a : {Ablation::NoGraphCleansing, Ablation::PlainAttention, Ablation::SelfAttentionFusion,
                     Ablation::NoDualStageFusion}) {
    const auto cmp = urbanembed::testing::full_model_gradcheck(a);
    EXPECT_TRUE(cmp.ok) << to_string(a) << " " << cmp.worst_parameter << " " << cmp.max_relative_error;
  }
}

TEST(Trainer, ZeroEpochsGivesEmptyLog) {
  TrainConfig c = small_config();
  c.epochs = 0;
  const TrainResult r = train(small_city(), c);
  EXPECT_TRUE(r.log.empty());
  EXPECT_EQ(r.embedding.rows(), 8);
  EXPECT_EQ(r.embedding.cols(), 32);
}

TEST(Trainer, Deterministic) {
  const Dataset d = small_city();
  const TrainResult a = train(d, small_config());
  const TrainResult b = train(d, small_config());
  EXPECT_EQ(a.log, b.log);
  EXPECT_EQ(a.embedding, b.embedding);
  TrainConfig other = small_config();
  other.seed = 3;
  EXPECT_NE(train(d, other).embedding, a.embedding);
}

TEST(Trainer, ThresholdsStayNonNegative) {
  TrainConfig c = small_config();
  c.epochs = 20;
  c.learning_rate = 0.05;
  const TrainResult r = train(small_city(), c);
  for (View v : kAllViews) EXPECT_GE(r.params.matrix(param_names::threshold(v))(0, 0), 0.0);
}

TEST(Trainer, CallbackSeesEveryEpoch) {
  std::vector<std::size_t> epochs;
  train(small_city(), small_config(), [&](const LossRecord& r) { epochs.push_back(r.epoch); });
  EXPECT_EQ(epochs, (std::vector<std::size_t>{1, 2, 3, 4, 5}));
}

TEST(Trainer, MatchesRecordedCurve) {
  const auto& rec = calibration()["training_curve"];
  TrainConfig c;
  c.epochs = rec["epochs"].get<std::size_t>();
  c.seed = rec["seed"].get<std::uint64_t>();
  const TrainResult r = train(generate_city(CityConfig{}), c);
  ASSERT_EQ(r.log.size(), rec["log"].size());
  for (std::size_t e : {std::size_t{0}, std::size_t{9}, r.log.size() - 1}) {
    const double expected = rec["log"][e]["total"].get<double>();
    EXPECT_NEAR(r.log[e].total, expected, 1e-9 * std::abs(expected)) << "epoch " << e + 1;
  }
  EXPECT_LT(r.log.back().total, r.log.front().total);
}

TEST(Checkpoint, RoundTrip) {
  TrainConfig c = small_config();
  c.ablation = Ablation::PlainAttention;
  c.beta = 0.25;
  const ParameterSet p = init_params(c, 8);
  TempDir tmp;
  save_checkpoint(Checkpoint{c, p, 8}, tmp.path() / "ck.json");
  const Checkpoint back = load_checkpoint(tmp.path() / "ck.json");
  EXPECT_EQ(back.params, p);
  EXPECT_EQ(back.n_regions, 8u);
  EXPECT_EQ(back.config.ablation, Ablation::PlainAttention);
  EXPECT_EQ(back.config.beta, 0.25);
  EXPECT_EQ(to_json(back.config), to_json(c));
}

TEST(Checkpoint, RejectsForeignFiles) {
  TempDir tmp;
  std::ofstream(tmp.path() / "x.json") << "{\"format\": \"other\"}";
  EXPECT_THROW(load_checkpoint(tmp.path() / "x.json"), DataError);
  std::ofstream(tmp.path() / "y.json") << "not json";
  EXPECT_THROW(load_checkpoint(tmp.path() / "y.json"), DataError);
  EXPECT_THROW(load_checkpoint(tmp.path() / "missing.json"), DataError);
}

TEST(Config, AblationNames) {
  for (Ablation a : {Ablation::None, Ablation::NoGraphCleansing, Ablation::PlainAttention,
                     Ablation::SelfAttentionFusion, Ablation::NoDualStageFusion}) {
    EXPECT_EQ(parse_ablation(to_string(a)), a);
  }
  EXPECT_EQ(parse_ablation("none"), Ablation::None);
  EXPECT_EQ(parse_ablation("no-gcl"), Ablation::NoGraphCleansing);
  EXPECT_EQ(parse_ablation("bogus"), std::nullopt);
  TrainConfig c;
  c.heads = 5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
