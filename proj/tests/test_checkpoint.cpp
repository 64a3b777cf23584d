#include <catch2/catch.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qgpe/checkpoint.hpp"

using namespace qgpe;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("uniform checkpoint round-trips exactly") {
    UniformCmps s = random_uniform_state(3, 5);
    const std::string p1 = "ckpt_u1.json", p2 = "ckpt_u2.json";
    save_checkpoint(p1, s);
    CheckpointState loaded = load_checkpoint(p1);
    REQUIRE(std::holds_alternative<UniformCmps>(loaded));
    UniformCmps s2 = std::get<UniformCmps>(loaded);
    REQUIRE((s2.Q - s.Q).norm() == 0.0);
    REQUIRE((s2.R - s.R).norm() == 0.0);

    // write -> read -> write is byte-identical
    save_checkpoint(p2, s2);
    REQUIRE(slurp(p1) == slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("finite checkpoint round-trips exactly") {
    FiniteCmps s;
    const int d = 2, n = 5;
    RandomStream rng(9);
    s.v1 = rng.gaussian_matrix(d, 1).col(0);
    s.v2 = rng.gaussian_matrix(d, 1).col(0);
    s.bc = BoundaryCondition::dirichlet(Complex(0.1, -0.2), Complex(0, 0));
    for (int i = 0; i < n; ++i) {
        s.grid.push_back(0.25 * i);
        s.Qs.push_back(rng.gaussian_matrix(d, d));
        s.Rs.push_back(rng.gaussian_matrix(d, d));
    }
    s.Rs.front() = s.bc.a * Matrix::Identity(d, d);
    s.Rs.back() = s.bc.b * Matrix::Identity(d, d);

    const std::string p1 = "ckpt_f1.json", p2 = "ckpt_f2.json";
    save_checkpoint(p1, s);
    CheckpointState loaded = load_checkpoint(p1);
    REQUIRE(std::holds_alternative<FiniteCmps>(loaded));
    FiniteCmps s2 = std::get<FiniteCmps>(loaded);
    REQUIRE(s2.points() == n);
    REQUIRE(s2.bc.kind == BoundaryCondition::Kind::Dirichlet);
    REQUIRE(s2.bc.a == s.bc.a);
    for (int i = 0; i < n; ++i) {
        REQUIRE((s2.Qs[i] - s.Qs[i]).norm() == 0.0);
        REQUIRE((s2.Rs[i] - s.Rs[i]).norm() == 0.0);
        REQUIRE(s2.grid[i] == s.grid[i]);
    }
    REQUIRE((s2.v1 - s.v1).norm() == 0.0);
    save_checkpoint(p2, s2);
    REQUIRE(slurp(p1) == slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("checkpoint format and kind are validated") {
    Json j = to_json(random_uniform_state(2, 1));
    j["format"] = "something-else";
    REQUIRE_THROWS_AS(checkpoint_from_json(j), ConfigError);
    Json j2 = to_json(random_uniform_state(2, 1));
    j2["kind"] = "mystery";
    REQUIRE_THROWS_AS(checkpoint_from_json(j2), ConfigError);
    REQUIRE_THROWS_AS(load_checkpoint("no_such_file.json"), ConfigError);
}

TEST_CASE("complex entries serialize as [re, im] pairs") {
    UniformCmps s;
    s.Q = Matrix(1, 1);
    s.R = Matrix(1, 1);
    s.Q << Complex(-0.5, 0.25);
    s.R << Complex(1.0, -2.0);
    Json j = to_json(s);
    REQUIRE(j["Q"][0][0][0].get<double>() == -0.5);
    REQUIRE(j["Q"][0][0][1].get<double>() == 0.25);
    REQUIRE(j["R"][0][0][0].get<double>() == 1.0);
    REQUIRE(j["R"][0][0][1].get<double>() == -2.0);
    REQUIRE(j["format"] == "qgpe-cmps-v1");
}
