#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "common/error.hpp"
#include "common/random.hpp"
#include "dataset/dataset.hpp"
#include "fixtures.hpp"

using namespace faasprof;

namespace {

const char* kJobs =
    "run_id,component,resource,cores,batch_size,lambda,rep,wait_s,pod_creation_s,overhead_s,compute_s,runtime_s\n"
    "c0001-full-r1,a,vm,4,10,,1,0.000000,1.000000,0.500000,2.000000,3.500000\n"
    "c0001-full-r1,b,vm,8,10,,1,0.250000,0.000000,0.000000,1.000000,1.250000\n"
    "c0002-full-r1,a,vm,2,10,,1,0.000000,1.000000,0.500000,4.000000,5.500000\n";

Dataset grid(std::vector<double> cores, std::vector<double> batch) {
  Matrix m(cores.size(), 3);
  for (std::size_t r = 0; r < cores.size(); ++r) {
    m(r, 0) = cores[r];
    m(r, 1) = batch[r];
    m(r, 2) = 1.0 + cores[r] + batch[r];
  }
  const std::vector<std::string> names{"cores", "batch_size", "runtime_s"};
  return make_dataset(names, m, "runtime_s", {"cores", "batch_size"});
}

}  // namespace

TEST_CASE("campaign job CSV loads with typed columns") {
  const auto dir = fixtures::scratch("ds_load");
  fixtures::write_text(dir / "jobs.csv", kJobs);
  const auto d = load_dataset((dir / "jobs.csv").string());
  CHECK(d.cols() == 12);
  CHECK(d.rows() == 3);
  CHECK(d.rejected == 0);
  CHECK_FALSE(d.column("component").numeric);
  CHECK(d.column("cores").numeric);
  CHECK(std::isnan(d.numeric("lambda")[0]));
  CHECK(d.targets()[2] == 5.5);
  CHECK(d.column_names() == job_csv_header());
}

TEST_CASE("empty, missing and malformed inputs") {
  const auto dir = fixtures::scratch("ds_bad");
  fixtures::write_text(dir / "empty.csv", "");
  CHECK_THROWS_AS(load_dataset((dir / "empty.csv").string()), DataError);
  CHECK_THROWS_AS(load_dataset((dir / "absent.csv").string()), IoError);

  std::string text = kJobs;
  text += "c0003-full-r1,a,vm,2\n";
  fixtures::write_text(dir / "short.csv", text);
  const auto d = load_dataset((dir / "short.csv").string());
  CHECK(d.rows() == 3);
  CHECK(d.rejected == 1);

  fixtures::write_text(dir / "zero.csv", std::string(kJobs) + "c0003-full-r1,a,vm,2,10,,1,0,0,0,0,0\n");
  CHECK(load_dataset((dir / "zero.csv").string()).rejected == 1);

  fixtures::write_text(dir / "text.csv", std::string(kJobs) + "c0003-full-r1,a,vm,two,10,,1,0,0,0,1,1\n");
  CHECK_THROWS_AS(load_dataset((dir / "text.csv").string()), DataError);

  fixtures::write_text(dir / "notarget.csv", "a,b\n1,2\n");
  CHECK_THROWS_AS(load_dataset((dir / "notarget.csv").string()), DataError);
}

TEST_CASE("inverse and log transforms") {
  const auto d = grid({1, 2, 4}, {5, 5, 5});
  FeatureRecipe r;
  r.features = {"cores"};
  Transform inv;
  inv.kind = TransformKind::inverse;
  inv.column = "cores";
  Transform lg;
  lg.kind = TransformKind::log;
  lg.column = "cores";
  r.transforms = {inv, lg};
  const auto out = engineer_features(d, r);
  CHECK(out.features == std::vector<std::string>{"cores", "inv_cores", "log_cores"});
  CHECK(out.numeric("inv_cores")[0] == 1.0);
  CHECK(out.numeric("inv_cores")[2] == 0.25);
  CHECK(out.numeric("log_cores")[0] == 0.0);
  CHECK(out.numeric("log_cores")[2] == doctest::Approx(std::log(4.0)).epsilon(1e-15));

  const auto zero = grid({0, 2}, {5, 5});
  CHECK_THROWS_AS(engineer_features(zero, r), DataError);

  r.transforms = {inv, inv};
  CHECK_THROWS_AS(engineer_features(d, r), DataError);
}

TEST_CASE("degree-two expansion of three features") {
  Matrix m(4, 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) m(r, c) = static_cast<double>(r + c + 1);
  const std::vector<std::string> names{"x", "y", "z", "t"};
  const auto d = make_dataset(names, m, "t", {"x", "y", "z"});
  FeatureRecipe r;
  r.features = {"x", "y", "z"};
  Transform p;
  p.kind = TransformKind::polynomial;
  p.degree = 2;
  r.transforms = {p};
  const auto out = engineer_features(d, r);
  CHECK(out.features.size() == 9);
  const std::set<std::string> f(out.features.begin(), out.features.end());
  for (const char* name : {"x^2", "x*y", "x*z", "y^2", "y*z", "z^2"}) CHECK(f.contains(name));
  CHECK(out.numeric("x*z")[1] == 2.0 * 4.0);

  // A feature and its inverse share a source, so their product is skipped.
  Transform inv;
  inv.kind = TransformKind::inverse;
  inv.column = "x";
  r.features = {"x"};
  r.transforms = {inv, p};
  const auto single = engineer_features(d, r);
  CHECK(single.features == std::vector<std::string>{"x", "inv_x", "x^2", "inv_x^2"});
}

TEST_CASE("one-hot categories are learned once") {
  const auto dir = fixtures::scratch("ds_onehot");
  fixtures::write_text(dir / "jobs.csv", kJobs);
  const auto d = load_dataset((dir / "jobs.csv").string());
  FeatureRecipe r;
  r.features = {"cores"};
  Transform oh;
  oh.kind = TransformKind::one_hot;
  oh.column = "component";
  r.transforms = {oh};
  const auto fitted = fit_recipe(r, d);
  CHECK(fitted.output_features == std::vector<std::string>{"cores", "component=a", "component=b"});
  const std::vector<std::size_t> only_a{0};
  const auto applied = apply_recipe(fitted, d.select(only_a));
  CHECK(applied.features == fitted.output_features);
  CHECK(applied.numeric("component=b")[0] == 0.0);
}

TEST_CASE("row selection by predicate") {
  const auto dir = fixtures::scratch("ds_select");
  fixtures::write_text(dir / "jobs.csv", kJobs);
  const auto d = load_dataset((dir / "jobs.csv").string());
  FeatureRecipe r;
  r.features = {"cores"};
  Transform s;
  s.kind = TransformKind::select_rows;
  s.predicate = RowPredicate::parse("component == 'a'");
  r.transforms = {s};
  CHECK(engineer_features(d, r).rows() == 2);
  s.predicate = RowPredicate::parse("cores >= 4");
  r.transforms = {s};
  CHECK(engineer_features(d, r).rows() == 2);
  CHECK(apply_recipe(fit_recipe(r, d), d, false).rows() == 3);
  CHECK_THROWS_AS(RowPredicate::parse("no operator here"), ConfigError);
}

TEST_CASE("normalization round-trips") {
  Rng rng(3);
  std::vector<double> cores, batch;
  for (int i = 0; i < 30; ++i) {
    cores.push_back(rng.uniform(1, 64));
    batch.push_back(rng.uniform(1, 100));
  }
  const auto d = grid(cores, batch);
  FeatureRecipe r;
  r.features = {"cores", "batch_size"};
  Transform n;
  n.kind = TransformKind::normalize;
  n.column = "*";
  r.transforms = {n};
  const auto fitted = fit_recipe(r, d);
  const auto out = apply_recipe(fitted, d);
  double mean = 0.0;
  for (double x : out.numeric("cores")) mean += x;
  CHECK(std::abs(mean / 30.0) < 1e-12);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(std::abs(denormalize(fitted, "cores", out.numeric("cores")[i]) - cores[i]) < 1e-9);
    CHECK(std::abs(denormalize(fitted, "batch_size", out.numeric("batch_size")[i]) - batch[i]) < 1e-9);
  }
  CHECK_THROWS_AS(denormalize(fitted, "runtime_s", 0.0), DataError);
}

TEST_CASE("interpolation and extrapolation splits") {
  const auto d = grid({4, 8, 12, 16, 20, 4, 12}, {1, 1, 1, 1, 1, 1, 1});
  SplitSpec s;
  s.kind = SplitKind::interpolation;
  s.column = "cores";
  s.values = {4, 12};
  const auto in = split(d, s);
  CHECK(in.test == std::vector<std::size_t>{0, 2, 5, 6});
  CHECK(in.train == std::vector<std::size_t>{1, 3, 4});

  s.values = {6};
  CHECK_THROWS_AS(split(d, s), DataError);

  s.kind = SplitKind::extrapolation;
  s.threshold = 12;
  const auto ex = split(d, s);
  CHECK(ex.test == std::vector<std::size_t>{3, 4});
  s.threshold = 20;
  CHECK_THROWS_AS(split(d, s), DataError);

  s.kind = SplitKind::holdout;
  s.fraction = 0.0;
  const auto all = split(d, s);
  CHECK(all.test.empty());
  CHECK(all.train.size() == 7);
  s.fraction = 1.0;
  CHECK_THROWS_AS(split(d, s), DataError);
}

TEST_CASE("holdout is a seeded partition") {
  const auto d = grid(std::vector<double>(50, 2.0), std::vector<double>(50, 3.0));
  SplitSpec s;
  s.kind = SplitKind::holdout;
  s.fraction = 0.2;
  s.seed = 11;
  const auto a = split(d, s);
  CHECK(a.test.size() == 10);
  CHECK(a.train.size() == 40);
  CHECK(split(d, s).test == a.test);
  s.seed = 12;
  CHECK(split(d, s).test != a.test);
}

TEST_CASE("kfold partitions rows with balanced folds") {
  for (std::size_t n : {5u, 17u, 100u})
    for (int k : {2, 3, 5}) {
      const auto folds = kfold(n, k, 9);
      REQUIRE(folds.size() == static_cast<std::size_t>(k));
      std::vector<int> seen(n, 0);
      std::size_t lo = n, hi = 0;
      for (const auto& f : folds) {
        lo = std::min(lo, f.test.size());
        hi = std::max(hi, f.test.size());
        CHECK(f.train.size() + f.test.size() == n);
        for (auto i : f.test) ++seen[i];
      }
      CHECK(hi - lo <= 1);
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    }
  CHECK_THROWS_AS(kfold(3, 5, 1), DataError);
  CHECK_THROWS_AS(kfold(10, 1, 1), DataError);
}

TEST_CASE("grouped folds keep groups together") {
  std::vector<double> groups;
  for (int g : {4, 8, 12, 16, 20, 24})
    for (int rep = 0; rep < 3; ++rep) groups.push_back(g);
  const auto folds = group_kfold(groups, 5, 2);
  CHECK(folds.size() == 5);
  std::vector<int> seen(groups.size(), 0);
  for (const auto& f : folds) {
    std::set<double> test, train;
    for (auto i : f.test) {
      test.insert(groups[i]);
      ++seen[i];
    }
    for (auto i : f.train) train.insert(groups[i]);
    for (double g : test) CHECK_FALSE(train.contains(g));
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  CHECK(group_kfold(groups, 10, 2).size() == 6);
  const std::vector<double> one(5, 1.0);
  CHECK_THROWS_AS(group_kfold(one, 5, 2), DataError);
}
