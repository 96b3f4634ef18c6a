#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cbflow/cb_builder.hpp"
#include "cbflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

using namespace cbflow;

namespace {

RadialProfile sample_profile() {
    CBParams p = solve_junctions(0.1, 1.25);
    return build_cb_profile(p);
}

}  // namespace

TEST_CASE("fmt emits the shortest representation that round-trips") {
    CHECK(fmt(0.5) == "0.5");
    CHECK(fmt(-3.0) == "-3");
    CHECK(fmt(0.1) == "0.1");
    CHECK(fmt(std::nan("")) == "nan");
    for (double x : {1.0 / 3.0, std::sqrt(2.0), -27.211276742958952, 1e-300, 2.5e17}) {
        CHECK(std::strtod(fmt(x).c_str(), nullptr) == x);
    }
}

TEST_CASE("profile round-trip preserves every bit and the cap") {
    RadialProfile p = sample_profile();
    std::ostringstream os;
    write_profile(os, p);
    std::istringstream is(os.str());
    RadialProfile q = read_profile(is);
    REQUIRE(q.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(q.s[i] == p.s[i]);
        CHECK(q.u[i] == p.u[i]);
    }
    CHECK(q.cap.family == p.cap.family);
    CHECK(q.cap.attach_s == p.cap.attach_s);
    CHECK(q.cap.a == p.cap.a);
    CHECK(q.cap.c == p.cap.c);

    // rewriting is byte-identical
    std::ostringstream os2;
    write_profile(os2, q);
    CHECK(os2.str() == os.str());

    std::istringstream garbage("# cap none\n1 two\n");
    CHECK_THROWS_AS(read_profile(garbage), std::runtime_error);
}

TEST_CASE("checkpoint round-trip with params and several records") {
    Checkpoint ck;
    ck.has_params = true;
    ck.params = solve_junctions(0.1, 1.25);
    RadialProfile p = sample_profile();
    for (double t : {0.0, 0.25, 0.7071067811865476}) {
        ck.times.push_back(t);
        ck.profiles.push_back(p);
    }
    std::ostringstream os;
    write_checkpoint(os, ck);
    std::istringstream is(os.str());
    Checkpoint rt = read_checkpoint(is);
    REQUIRE(rt.times.size() == 3);
    CHECK(rt.has_params);
    CHECK(rt.params.rc == ck.params.rc);
    CHECK(rt.params.s2 == ck.params.s2);
    CHECK(rt.params.sb == ck.params.sb);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(rt.times[i] == ck.times[i]);
        CHECK(rt.profiles[i].u == ck.profiles[i].u);
    }
    std::ostringstream os2;
    write_checkpoint(os2, rt);
    CHECK(os2.str() == os.str());

    std::istringstream empty("== params\nrc 0.1\n");
    CHECK_THROWS_AS(read_checkpoint(empty), std::runtime_error);
}

TEST_CASE("diagnostics csv has the fixed column set with empty noose cells") {
    FlowSeries fs;
    fs.times = {0.0, 0.01};
    fs.profiles.resize(2);
    FrameDiag d0;
    d0.sup_K = 0.5;
    d0.inf_K = -1.0;
    d0.vol_total = 12.5;
    d0.vol_bulb = 4.0;
    d0.width = 6.25;
    d0.noose_rho = 0.1;
    d0.noose_len = 1.5;
    d0.noose_area = 3.75;
    FrameDiag d1 = d0;  // noose gone: NaN -> empty cells
    d1.noose_rho = d1.noose_len = d1.noose_area = std::nan("");
    fs.diags = {d0, d1};

    std::ostringstream os;
    write_diagnostics_csv(os, fs);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,supK,infK,vol_total,vol_bulb,width,noose_rho,noose_len,noose_area");
    std::getline(is, line);
    CHECK(line == "0,0.5,-1,12.5,4,6.25,0.1,1.5,3.75");
    std::getline(is, line);
    CHECK(line == "0.01,0.5,-1,12.5,4,6.25,,,");
}

TEST_CASE("file round-trips and sorted deterministic json") {
    std::string dir = "/tmp/cbflow_io_test";
    std::remove((dir + "_p.txt").c_str());

    RadialProfile p = sample_profile();
    save_profile(dir + "_p.txt", p);
    RadialProfile q = load_profile(dir + "_p.txt");
    CHECK(q.u == p.u);

    CBParams params = solve_junctions(0.05, 2.5);
    nlohmann::json j = params_to_json(params);
    save_json(dir + "_j.json", j);
    nlohmann::json j2 = load_json(dir + "_j.json");
    CBParams back = params_from_json(j2);
    CHECK(back.rc == params.rc);
    CHECK(back.s0 == params.s0);
    CHECK(back.sb == params.sb);
    // deterministic rewrite
    save_json(dir + "_j2.json", j2);
    std::ifstream a(dir + "_j.json"), b(dir + "_j2.json");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());

    CHECK_THROWS_AS(load_profile("/nonexistent/path.txt"), std::runtime_error);
}
