#include <doctest.h>

#include <vector>

#include "fairmult/empdist.hpp"
#include "fairmult/errors.hpp"
#include "fixtures.hpp"

using namespace fairmult;
using fairtest::example_dist;

TEST_CASE("distribution: masses and base rates") {
    const EmpiricalDistribution d = example_dist();
    CHECK(d.size() == 4);
    CHECK(d.group_mass(Group::A) == rat_frac(1, 2));
    CHECK(d.group_mass(Group::B) == rat_frac(1, 2));
    CHECK(d.base_rate() == rat_frac(41, 80));
    CHECK(d.base_rate(Group::A) == rat_frac(5, 8));
    CHECK(d.base_rate(Group::B) == rat_frac(2, 5));
}

TEST_CASE("distribution: id lookup") {
    const EmpiricalDistribution d = example_dist();
    CHECK(d.index_of("x1") == 0);
    CHECK(d.index_of("x3") == 2);
    CHECK(d[d.index_of("x4")].label_rate == rat_frac(7, 10));
    CHECK_THROWS_AS(d.index_of("nope"), DataError);
}

TEST_CASE("distribution: construction rejects bad input") {
    auto pt = [](const char* id, Rat mass, Rat rate, Group g) {
        return PointRecord{id, mass, rate, g};
    };
    // masses not summing to one
    CHECK_THROWS_AS(EmpiricalDistribution({
                        pt("a", rat_frac(1, 2), rat_frac(1, 2), Group::A),
                        pt("b", rat_frac(1, 4), rat_frac(1, 2), Group::B),
                    }),
                    DataError);
    // negative mass
    CHECK_THROWS_AS(EmpiricalDistribution({
                        pt("a", rat_frac(3, 2), rat_frac(1, 2), Group::A),
                        pt("b", rat_frac(-1, 2), rat_frac(1, 2), Group::B),
                    }),
                    DataError);
    // label rate out of [0, 1]
    CHECK_THROWS_AS(EmpiricalDistribution({
                        pt("a", rat_frac(1, 2), rat_frac(3, 2), Group::A),
                        pt("b", rat_frac(1, 2), rat_frac(1, 2), Group::B),
                    }),
                    DataError);
    // duplicate id
    CHECK_THROWS_AS(EmpiricalDistribution({
                        pt("a", rat_frac(1, 2), rat_frac(1, 2), Group::A),
                        pt("a", rat_frac(1, 2), rat_frac(1, 2), Group::B),
                    }),
                    DataError);
    CHECK_THROWS_AS(EmpiricalDistribution({}), DataError);
}

TEST_CASE("base_rate of an empty group throws") {
    const EmpiricalDistribution d({
        PointRecord{"a", Rat(1), rat_frac(1, 2), Group::A},
    });
    CHECK(d.group_mass(Group::B) == 0);
    CHECK_THROWS_AS(d.base_rate(Group::B), DataError);
}

static RowDataset tiny_rows() {
    RowDataset rows;
    rows.feature_names = {"f1", "f2"};
    rows.features = {{1, 0}, {1, 0}, {2, 0}, {1, 0}};
    rows.group = {Group::A, Group::A, Group::B, Group::A};
    rows.label = {1, 0, 1, 0};
    return rows;
}

TEST_CASE("aggregate_rows collapses duplicate rows") {
    const Aggregation agg = aggregate_rows(tiny_rows());
    REQUIRE(agg.dist.size() == 2);
    // canonical order: lexicographic by features, then group
    CHECK(agg.point_features[0] == std::vector<double>{1, 0});
    CHECK(agg.point_features[1] == std::vector<double>{2, 0});
    CHECK(agg.dist[0].mass == rat_frac(3, 4));
    CHECK(agg.dist[0].label_rate == rat_frac(1, 3));
    CHECK(agg.dist[0].group == Group::A);
    CHECK(agg.dist[1].mass == rat_frac(1, 4));
    CHECK(agg.dist[1].label_rate == 1);
    CHECK(agg.dist[1].group == Group::B);
    CHECK(agg.point_of_row == std::vector<std::size_t>{0, 0, 1, 0});
}

TEST_CASE("aggregation is row-order independent") {
    RowDataset shuffled = tiny_rows();
    std::swap(shuffled.features[0], shuffled.features[2]);
    std::swap(shuffled.group[0], shuffled.group[2]);
    std::swap(shuffled.label[0], shuffled.label[2]);

    const Aggregation a = aggregate_rows(tiny_rows());
    const Aggregation b = aggregate_rows(shuffled);
    REQUIRE(a.dist.size() == b.dist.size());
    for (std::size_t i = 0; i < a.dist.size(); ++i) {
        CHECK(a.dist[i].mass == b.dist[i].mass);
        CHECK(a.dist[i].label_rate == b.dist[i].label_rate);
        CHECK(a.dist[i].group == b.dist[i].group);
        CHECK(a.point_features[i] == b.point_features[i]);
    }
}

TEST_CASE("same features in different groups stay separate points") {
    RowDataset rows;
    rows.feature_names = {"x"};
    rows.features = {{5}, {5}};
    rows.group = {Group::A, Group::B};
    rows.label = {1, 0};
    const Aggregation agg = aggregate_rows(rows);
    CHECK(agg.dist.size() == 2);
    CHECK(agg.dist[0].group == Group::A);  // A sorts before B
    CHECK(agg.dist[1].group == Group::B);
}

TEST_CASE("row validation") {
    RowDataset rows = tiny_rows();
    rows.label[1] = 2;
    CHECK_THROWS_AS(rows.validate(), DataError);
    rows = tiny_rows();
    rows.features[1].pop_back();
    CHECK_THROWS_AS(rows.validate(), DataError);
    CHECK_NOTHROW(tiny_rows().validate());
}

TEST_CASE("from_rows equals the aggregation distribution") {
    const EmpiricalDistribution d = from_rows(tiny_rows());
    const Aggregation agg = aggregate_rows(tiny_rows());
    REQUIRE(d.size() == agg.dist.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d[i].mass == agg.dist[i].mass);
        CHECK(d[i].label_rate == agg.dist[i].label_rate);
    }
}
