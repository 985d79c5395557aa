#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include "fairmult/csvio.hpp"
#include "fairmult/errors.hpp"
#include "fairmult/synth.hpp"

using namespace fairmult;

TEST_CASE("profile names round trip, junk rejected") {
    for (SynthProfile p : {SynthProfile::income_like, SynthProfile::employment_like,
                           SynthProfile::almp_like})
        CHECK(parse_profile(profile_name(p)) == p);
    CHECK_THROWS_AS(parse_profile("bogus"), DataError);
}

TEST_CASE("generation is deterministic in the seed") {
    SynthConfig cfg;
    cfg.profile = SynthProfile::employment_like;
    cfg.n = 500;
    cfg.group_offset = -0.5;
    cfg.seed = 21;
    const std::string a = csv_to_string(synth_to_csv(generate_synthetic(cfg)));
    const std::string b = csv_to_string(synth_to_csv(generate_synthetic(cfg)));
    CHECK(a == b);
    cfg.seed = 22;
    CHECK(a != csv_to_string(synth_to_csv(generate_synthetic(cfg))));
}

TEST_CASE("row shape and parameter comments") {
    SynthConfig cfg;
    cfg.profile = SynthProfile::income_like;
    cfg.n = 300;
    cfg.group_offset = -0.86;
    cfg.seed = 5;
    const SynthResult res = generate_synthetic(cfg);
    CHECK(res.data.n_rows() == 300);
    CHECK(res.data.feature_names ==
          std::vector<std::string>{"education", "age", "hours"});
    CHECK(res.group_offset_used == -0.86);

    const CsvTable t = synth_to_csv(res);
    CHECK(t.header == std::vector<std::string>{"education", "age", "hours",
                                               "group", "label"});
    CHECK(t.rows.size() == 300);
    bool has_profile = false, has_seed = false;
    for (const std::string& c : t.comments) {
        if (c.find("profile=income-like") != std::string::npos) has_profile = true;
        if (c.find("seed=5") != std::string::npos) has_seed = true;
    }
    CHECK(has_profile);
    CHECK(has_seed);

    // integer-valued features on the documented supports
    std::set<double> edu;
    for (const auto& row : res.data.features) {
        edu.insert(row[0]);
        CHECK(row[0] == std::floor(row[0]));
        CHECK(row[0] >= 1);
        CHECK(row[0] <= 16);
    }
    CHECK(edu.size() > 3);  // the support is actually explored
}

TEST_CASE("generated CSV ingests back cleanly") {
    SynthConfig cfg;
    cfg.profile = SynthProfile::almp_like;
    cfg.n = 400;
    cfg.group_offset = -0.3;
    cfg.seed = 9;
    const CsvTable t = synth_to_csv(generate_synthetic(cfg));
    IngestConfig ic;
    ic.group_col = "group";
    ic.label_col = "label";
    const IngestResult r = ingest(t, ic);
    CHECK(r.data.n_rows() == 400);
    CHECK(r.data.feature_names ==
          std::vector<std::string>{"months_unemployed", "prior_jobs", "age"});
}

TEST_CASE("design rates match empirical rates at scale") {
    SynthConfig cfg;
    cfg.profile = SynthProfile::income_like;
    cfg.n = 50000;
    cfg.group_offset = -0.86;
    cfg.seed = 31;
    const SynthResult res = generate_synthetic(cfg);

    double n_a = 0, pos_a = 0, n_b = 0, pos_b = 0;
    for (std::size_t i = 0; i < res.data.n_rows(); ++i) {
        if (res.data.group[i] == Group::A) {
            n_a += 1;
            pos_a += res.data.label[i];
        } else {
            n_b += 1;
            pos_b += res.data.label[i];
        }
    }
    // binomial noise at n = 50k is well under 0.01
    CHECK(std::abs(pos_a / n_a - res.design_rate_a) < 0.012);
    CHECK(std::abs(pos_b / n_b - res.design_rate_b) < 0.012);
    CHECK(std::abs(n_b / (n_a + n_b) - 0.48) < 0.012);  // profile default
}

TEST_CASE("dbr target solves for the offset") {
    SynthConfig cfg;
    cfg.profile = SynthProfile::employment_like;
    cfg.n = 10;
    cfg.dbr_target = 0.15;
    const SynthResult res = generate_synthetic(cfg);
    CHECK(res.design_rate_a - res.design_rate_b ==
          doctest::Approx(0.15).epsilon(1e-9));
    CHECK(res.group_offset_used < 0.0);

    cfg.dbr_target = 0.0;
    CHECK(generate_synthetic(cfg).group_offset_used ==
          doctest::Approx(0.0).epsilon(1e-9));

    cfg.dbr_target = 0.99;  // unreachable for a bounded logit family
    CHECK_THROWS_AS(generate_synthetic(cfg), DataError);
}

TEST_CASE("design window mass: exact enumeration") {
    // income-like places the education-8 block, and nothing else, inside
    // [0, 0.86); its weight is 23/160
    CHECK(design_window_mass(SynthProfile::income_like, 0.0, 0.86) ==
          doctest::Approx(23.0 / 160.0).epsilon(1e-12));
    CHECK(design_window_mass(SynthProfile::income_like, -1e9, 1e9) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(design_window_mass(SynthProfile::income_like, 5.0, 5.0) == 0.0);
}

TEST_CASE("group fraction override") {
    SynthConfig cfg;
    cfg.profile = SynthProfile::income_like;
    cfg.n = 20000;
    cfg.group_b_frac = 0.25;
    cfg.seed = 8;
    const SynthResult res = generate_synthetic(cfg);
    double nb = 0;
    for (Group g : res.data.group) nb += (g == Group::B);
    CHECK(std::abs(nb / 20000.0 - 0.25) < 0.02);
}
