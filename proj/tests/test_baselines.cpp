#include <doctest.h>

#include <cmath>
#include <sstream>

#include "scdt/baselines.hpp"
#include "scdt/error.hpp"

using namespace scdt;

namespace {

struct WarningCapture {
  std::vector<std::string> messages;
  WarningCapture() {
    set_warning_sink([this](std::string_view m) { messages.emplace_back(m); });
  }
  ~WarningCapture() { set_warning_sink(nullptr); }
};

Dataset load(const std::string& schema_json, const std::string& csv) {
  auto schema = std::make_shared<const FeatureSchema>(parse_schema_json(schema_json));
  std::istringstream in(csv);
  return read_dataset(in, schema);
}

}  // namespace

TEST_CASE("one-hot encoding") {
  const std::vector<std::string> levels{"a", "b", "c"};
  const std::vector<LevelId> ids{1, 0, 2, 1};
  const auto cols = encode_one_hot("f", levels, ids);
  REQUIRE(cols.size() == 3);
  CHECK(cols[0].name == "f=a");
  CHECK(cols[1].ids == std::vector<LevelId>{1, 0, 0, 1});
  // row 0 (level b) reads [0, 1, 0]
  CHECK(cols[0].ids[0] == 0);
  CHECK(cols[1].ids[0] == 1);
  CHECK(cols[2].ids[0] == 0);
  // each row has exactly one indicator set
  for (std::size_t r = 0; r < ids.size(); ++r) {
    int sum = 0;
    for (const auto& c : cols) sum += c.ids[r];
    CHECK(sum == 1);
  }
  CHECK(cols[2].terrain.graph().edges().size() == 1);

  WarningCapture capture;
  const std::vector<std::string> single{"only"};
  const std::vector<LevelId> zeros{0, 0};
  CHECK(encode_one_hot("g", single, zeros).empty());
  REQUIRE(capture.messages.size() == 1);
  CHECK(capture.messages[0].find("ConstantColumn") != std::string::npos);
}

TEST_CASE("ordinal target ranking") {
  // means: a = 1.0, b = 0.0, c = 0.5
  const std::vector<LevelId> ids{0, 0, 1, 1, 2, 2};
  const std::vector<double> y{1, 1, 0, 0, 1, 0};
  const auto map = fit_ordinal(3, ids, y);
  CHECK(map.rank == std::vector<int>{2, 0, 1});
  CHECK(map.by_rank == std::vector<LevelId>{1, 2, 0});
  CHECK(map.global_mean == doctest::Approx(0.5));

  const std::vector<std::string> levels{"a", "b", "c"};
  const auto enc = encode_ordinal("f", levels, map, ids);
  CHECK(enc.terrain.level_names() == std::vector<std::string>{"b", "c", "a"});
  CHECK(enc.ids == std::vector<LevelId>{2, 2, 0, 0, 1, 1});

  SUBCASE("ties go to the lower id") {
    const std::vector<LevelId> tie_ids{0, 1, 2};
    const std::vector<double> tie_y{1, 1, 0};
    const auto t = fit_ordinal(3, tie_ids, tie_y);
    CHECK(t.rank == std::vector<int>{1, 2, 0});
  }
  SUBCASE("unseen levels borrow the rank nearest the global mean") {
    const auto m4 = fit_ordinal(4, ids, y);
    CHECK(m4.seen() == 3);
    CHECK(std::isnan(m4.means[3]));
    CHECK(m4.rank[3] == m4.rank[2]);  // c's mean equals the global mean
    WarningCapture capture;
    const std::vector<std::string> l4{"a", "b", "c", "d"};
    const std::vector<LevelId> apply{3};
    CHECK(encode_ordinal("f", l4, m4, apply).ids == std::vector<LevelId>{1});
    CHECK(capture.messages.size() == 1);
  }
}

TEST_CASE("siloed table") {
  const std::vector<LevelId> county{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1};
  const std::vector<LevelId> month{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1};
  const std::vector<double> y{1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 1};
  const auto table = SiloedTable::fit({county, month}, y);
  const std::vector<LevelId> seen{0, 0};
  CHECK(table.predict(seen) == doctest::Approx(0.3));
  const std::vector<LevelId> unseen{1, 0};
  CHECK(table.predict(unseen) == doctest::Approx(4.0 / 11.0));
  CHECK(table.cells().size() == 2);
}

TEST_CASE("preprocessor by feature kind") {
  const std::string schema = R"({
    "target": "y",
    "features": [
      {"name": "m", "kind": "ordinal_declared", "levels": ["Jan", "Feb", "Mar"]},
      {"name": "c", "kind": "one_hot", "levels": ["x", "y"]},
      {"name": "o", "kind": "ordinal_target", "levels": ["p", "q", "r"]},
      {"name": "t", "kind": "numeric", "max_bins": 2},
      {"name": "k", "kind": "numeric"}
    ]})";
  const auto train = load(schema,
                          "m,c,o,t,k,y\n"
                          "Jan,x,p,1,5,1\n"
                          "Feb,y,q,2,5,0\n"
                          "Mar,x,r,3,5,1\n"
                          "Jan,y,p,4,5,0\n");
  WarningCapture capture;
  const auto pre = Preprocessor::fit(train);
  REQUIRE(capture.messages.size() == 1);  // k is constant
  const auto& tpl = pre.design_template();
  std::vector<std::string> names;
  for (const auto& f : tpl) names.push_back(f.name);
  CHECK(names == std::vector<std::string>{"m", "c=x", "c=y", "o", "t"});
  CHECK(tpl[0].terrain.graph().edges().size() == 2);
  CHECK(tpl[3].terrain.level_names() == std::vector<std::string>{"q", "p", "r"});

  const Design d = pre.transform(train);
  CHECK(d.features[0].ids == std::vector<LevelId>{0, 1, 2, 0});
  CHECK(d.features[1].ids == std::vector<LevelId>{1, 0, 1, 0});
  CHECK(d.features[4].ids == std::vector<LevelId>{0, 0, 1, 1});

  const auto restored = Preprocessor::from_json(pre.to_json(), train.schema);
  CHECK(restored.to_json() == pre.to_json());
  const Design d2 = restored.transform(train);
  for (std::size_t f = 0; f < d.features.size(); ++f) CHECK(d2.features[f].ids == d.features[f].ids);

  // out-of-range numerics clamp to the end bins
  const auto test = load(schema, "m,c,o,t,k,y\nMar,y,r,-100,0,0\nMar,y,r,100,0,1\n");
  CHECK(pre.transform(test).features[4].ids == std::vector<LevelId>{0, 1});
}
