#include <doctest.h>

#include "topotrace/config.hpp"

using namespace topotrace;

TEST_SUITE("config") {

TEST_CASE("parse_config reads key=value lines with comments") {
    const auto values = parse_config("# header\n k = 21 \n\ns=17 # inline\ntau_conf=0.6\n");
    CHECK(values.size() == 3);
    CHECK(values.at("k") == "21");
    CHECK(values.at("s") == "17");
    CHECK(values.at("tau_conf") == "0.6");
}

TEST_CASE("parse_config rejects malformed input") {
    CHECK_THROWS_AS(parse_config("k 21\n"), FormatError);
    CHECK_THROWS_AS(parse_config("=3\n"), FormatError);
    CHECK_THROWS_AS(parse_config("bogus=1\n"), FormatError);
    CHECK_THROWS_AS(parse_config("k=1\nk=2\n"), FormatError);
}

TEST_CASE("apply_config sets every section") {
    RunConfig cfg;
    apply_config(cfg, parse_config("k=21\ns=17\ntau_occupancy=0.4\ntau_conf=0.6\nr_nbhd=4\nd_restart=40\n"
                                   "tau_restart=0.8\nmax_steps=99\nd_match=3\nconnectivity_ratio=0.7\n"
                                   "d_near=12\nsymmetric_ratio=true\nseed=18446744073709551615\nwidth=128\n"
                                   "height=96\nn_seeds=3\nbranch_prob=0.25\nstep_len=6\nn_components=2\n"
                                   "max_branches=4\nmax_branch_depth=1\nblur_radius=2\nnoise_amp=0.1\n"
                                   "gap_count=3\ngap_len=5\nclutter_count=4\nsigma=1.5\n"));
    CHECK(cfg.delineation.oracle.k == 21);
    CHECK(cfg.delineation.oracle.s == 17);
    CHECK(cfg.delineation.oracle.tau_occupancy == 0.4);
    CHECK(cfg.delineation.tau_conf == 0.6);
    CHECK(cfg.delineation.r_nbhd == 4);
    CHECK(cfg.delineation.d_restart == 40.0);
    CHECK(cfg.delineation.tau_restart == 0.8);
    CHECK(cfg.delineation.max_steps == 99);
    CHECK(cfg.eval.d_match == 3.0);
    CHECK(cfg.eval.connectivity_ratio == 0.7);
    CHECK(cfg.eval.d_near == 12.0);
    CHECK(cfg.eval.symmetric_ratio);
    CHECK(cfg.synth.seed == 18446744073709551615ULL);
    CHECK(cfg.synth.width == 128);
    CHECK(cfg.synth.height == 96);
    CHECK(cfg.synth.n_seeds == 3);
    CHECK(cfg.synth.branch_prob == 0.25);
    CHECK(cfg.synth.step_len == 6);
    CHECK(cfg.synth.n_components == 2);
    CHECK(cfg.synth.max_branches == 4);
    CHECK(cfg.synth.max_branch_depth == 1);
    CHECK(cfg.synth.corruption.blur_radius == 2);
    CHECK(cfg.synth.corruption.noise_amp == 0.1);
    CHECK(cfg.synth.corruption.gap_count == 3);
    CHECK(cfg.synth.corruption.gap_len == 5);
    CHECK(cfg.synth.corruption.clutter_count == 4);
    CHECK(cfg.sigma == 1.5);
    CHECK_NOTHROW(cfg.validate());
    CHECK(config_keys().size() == 27);
}

TEST_CASE("apply_config rejects bad values") {
    RunConfig cfg;
    CHECK_THROWS_AS(apply_config(cfg, {{"k", "abc"}}), InvalidArgument);
    CHECK_THROWS_AS(apply_config(cfg, {{"k", "3.5"}}), InvalidArgument);
    CHECK_THROWS_AS(apply_config(cfg, {{"symmetric_ratio", "maybe"}}), InvalidArgument);
    CHECK_THROWS_AS(apply_config(cfg, {{"nope", "1"}}), InvalidArgument);
    apply_config(cfg, {{"k", "8"}});
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

}  // TEST_SUITE
