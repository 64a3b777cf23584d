#include <catch2/catch.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qgpe/checkpoint.hpp"
#include "qgpe/oracle.hpp"

using namespace qgpe;

namespace {
std::string bin() {
    const char* b = std::getenv("QGPE_BIN");
    REQUIRE(b != nullptr);
    return b;
}

int run(const std::string& args) {
    std::string cmd = bin() + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("cli: invalid configuration exits with code 1") {
    REQUIRE(run("ground --D 0 --g 1 --mu 1 --out-dir cli_bad") == 1);
    REQUIRE(run("definitely-not-a-command") == 1);
    REQUIRE(run("evolve --checkpoint missing.json --out-dir cli_bad") == 1);
}

TEST_CASE("cli: oracle subcommands emit reference JSON") {
    REQUIRE(run("oracle bogoliubov --k 0 --g 1 --rho 1") == 0);
    Json j = Json::parse(slurp("cli_stdout.txt"));
    REQUIRE(j["omega"].get<double>() == 0.0);

    REQUIRE(run("oracle bethe --gamma 1000 --n-quad 128") == 0);
    Json jb = Json::parse(slurp("cli_stdout.txt"));
    double expect = M_PI * M_PI / 3.0 * (1.0 - 4.0 / 1000.0);
    REQUIRE(jb["e"].get<double>() == Approx(expect).epsilon(0.01));

    REQUIRE(run("oracle bethe --gamma -1") == 1);
}

TEST_CASE("cli: mean-field ground run and determinism") {
    REQUIRE(run("ground --D 1 --g 1 --mu 1 --tol 1e-9 --seed 7 --out-dir cli_g1") == 0);
    Json rep = Json::parse(slurp("cli_g1/ground_report.json"));
    REQUIRE(rep["particle_density"].get<double>() == Approx(0.5).margin(1e-6));
    REQUIRE(rep["energy_density"].get<double>() == Approx(-0.25).margin(1e-6));
    REQUIRE(rep["converged"].get<bool>());

    // identical config + seed: byte-identical outputs
    REQUIRE(run("ground --D 1 --g 1 --mu 1 --tol 1e-9 --seed 7 --out-dir cli_g2") == 0);
    REQUIRE(slurp("cli_g1/ground_report.json") == slurp("cli_g2/ground_report.json"));
    REQUIRE(slurp("cli_g1/ground_trace.csv") == slurp("cli_g2/ground_trace.csv"));
    REQUIRE(slurp("cli_g1/ground_checkpoint.json") == slurp("cli_g2/ground_checkpoint.json"));

    // trace rows are monotone in energy
    std::ifstream trace("cli_g1/ground_trace.csv");
    std::string line;
    std::getline(trace, line);
    REQUIRE(line == "step,tau,energy,grad_norm,dt");
    double prev = 1e300;
    bool first = true;
    while (std::getline(trace, line)) {
        std::stringstream ss(line);
        std::string tok;
        std::getline(ss, tok, ',');
        std::getline(ss, tok, ',');
        std::getline(ss, tok, ',');
        double e = std::stod(tok);
        if (!first) REQUIRE(e <= prev + 1e-12 * std::abs(prev));
        prev = e;
        first = false;
    }
}

TEST_CASE("cli: config file with flag overrides") {
    {
        std::ofstream cfg("cli_cfg.toml");
        cfg << "D = 1\n"
            << "g = 1.0\n"
            << "mu = 0.5\n"
            << "tol = 1e-9\n";
    }
    REQUIRE(run("ground --config cli_cfg.toml --mu 1.0 --seed 3 --out-dir cli_cfgout") == 0);
    Json rep = Json::parse(slurp("cli_cfgout/ground_report.json"));
    REQUIRE(rep["mu"].get<double>() == 1.0);  // flag wins over the file
    REQUIRE(rep["particle_density"].get<double>() == Approx(0.5).margin(1e-6));
}

TEST_CASE("cli: evolve preserves a stationary state and writes a checkpoint") {
    REQUIRE(run("ground --D 1 --g 1 --mu 1 --tol 1e-10 --seed 5 --out-dir cli_ev") == 0);
    REQUIRE(run("evolve --checkpoint cli_ev/ground_checkpoint.json --mode real "
                "--g 1 --mu 1 --t-end 0.2 --dt 1e-2 --out-dir cli_ev") == 0);
    std::ifstream traj("cli_ev/evolve_trajectory.csv");
    std::string line;
    std::getline(traj, line);
    REQUIRE(line == "time,energy,density,canonical_residual");
    double e0 = 0;
    bool first = true;
    int rows = 0;
    while (std::getline(traj, line)) {
        std::stringstream ss(line);
        std::string tok;
        std::getline(ss, tok, ',');
        std::getline(ss, tok, ',');
        double e = std::stod(tok);
        if (first) e0 = e;
        first = false;
        REQUIRE(e == Approx(e0).margin(1e-8));
        ++rows;
    }
    REQUIRE(rows == 21);
    CheckpointState final = load_checkpoint("cli_ev/evolve_checkpoint.json");
    REQUIRE(std::holds_alternative<UniformCmps>(final));
}

TEST_CASE("cli: respond sweep emits the response table") {
    REQUIRE(run("ground --D 1 --g 1 --mu 1 --tol 1e-10 --seed 5 --out-dir cli_rs") == 0);
    REQUIRE(run("respond --checkpoint cli_rs/ground_checkpoint.json --g 1 --mu 1 "
                "--kmin 0.5 --kmax 2.0 --nk 4 --out-dir cli_rs") == 0);
    std::ifstream csv("cli_rs/response.csv");
    std::string line;
    std::getline(csv, line);
    REQUIRE(line == "k_over_kf,amplitude,residual,error");
    int rows = 0;
    const double kf = M_PI * 0.5;
    while (std::getline(csv, line)) {
        std::stringstream ss(line);
        std::string kk, amp;
        std::getline(ss, kk, ',');
        std::getline(ss, amp, ',');
        double k = std::stod(kk) * kf;
        double expect = 0.5 / (k * k + 2.0);  // mean-field susceptibility
        REQUIRE(std::stod(amp) == Approx(expect).epsilon(1e-5));
        ++rows;
    }
    REQUIRE(rows == 4);
}

TEST_CASE("cli: spectrum matches the classical dispersion at D=1") {
    REQUIRE(run("ground --D 1 --g 1 --mu 1 --tol 1e-10 --seed 5 --out-dir cli_sp") == 0);
    REQUIRE(run("spectrum --checkpoint cli_sp/ground_checkpoint.json --g 1 --mu 1 "
                "--kmin 0.4 --kmax 1.2 --nk 3 --n-modes 1 --out-dir cli_sp") == 0);
    std::ifstream csv("cli_sp/spectrum.csv");
    std::string line;
    std::getline(csv, line);
    REQUIRE(line == "k,omega_1,error");
    while (std::getline(csv, line)) {
        std::stringstream ss(line);
        std::string kk, ww;
        std::getline(ss, kk, ',');
        std::getline(ss, ww, ',');
        double k = std::stod(kk);
        REQUIRE(std::stod(ww) == Approx(bogoliubov_dispersion(k, 1.0, 0.5)).epsilon(1e-7));
    }
}

TEST_CASE("cli: empty momentum grid produces a header-only table") {
    REQUIRE(run("ground --D 1 --g 1 --mu 1 --tol 1e-9 --seed 5 --out-dir cli_empty") == 0);
    REQUIRE(run("respond --checkpoint cli_empty/ground_checkpoint.json --g 1 --mu 1 "
                "--nk 0 --out-dir cli_empty") == 0);
    REQUIRE(slurp("cli_empty/response.csv") == "k_over_kf,amplitude,residual,error\n");
}
