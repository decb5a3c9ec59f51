#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "matchgate/cli.hpp"
#include "matchgate/io.hpp"
#include "support/generators.hpp"

using namespace matchgate;
namespace fs = std::filesystem;

namespace {

std::string render_matchgate(const PlaneGraph& g) {
    std::ostringstream ss;
    write_matchgate(ss, g);
    return ss.str();
}

std::string render_signature(const SignatureVector& s) {
    std::ostringstream ss;
    write_signature(ss, s);
    return ss.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mgate_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("matchgate files round trip canonically", "[io]") {
    testsupport::Rng rng(601);
    for (int trial = 0; trial < 25; ++trial) {
        PlaneGraph g = testsupport::random_plane_matchgate(rng);
        std::string text = render_matchgate(g);
        std::istringstream in(text);
        PlaneGraph back = read_matchgate(in);
        REQUIRE(render_matchgate(back) == text);
        REQUIRE(signature(back) == signature(g));
    }
}

TEST_CASE("oriented matchgate files round trip", "[io]") {
    OrientedPlaneGraph h = testsupport::oriented_square_with_tips();
    std::ostringstream out;
    write_oriented_matchgate(out, h);
    std::istringstream in(out.str());
    OrientedPlaneGraph back = read_oriented_matchgate(in);
    REQUIRE(back.low_to_high == h.low_to_high);
    REQUIRE(back.base.edges == h.base.edges);
    REQUIRE(verify_kasteleyn(back));
}

TEST_CASE("signature files round trip", "[io]") {
    testsupport::Rng rng(607);
    for (int trial = 0; trial < 25; ++trial) {
        SignatureVector s =
            generate_mgi_vector(testsupport::random_skew(rng, testsupport::pick(rng, 7)));
        std::string text = render_signature(s);
        std::istringstream in(text);
        SignatureVector back = read_signature(in);
        REQUIRE(back == s);
        REQUIRE(render_signature(back) == text);
    }
    SECTION("arity-0 entry uses the empty-bitstring token") {
        SignatureVector s = SignatureVector::zeros(0);
        s.at(0) = GaussianRational(1);
        std::string text = render_signature(s);
        REQUIRE(text == "sig v1 arity 0\n- 1\n");
        std::istringstream in(text);
        REQUIRE(read_signature(in) == s);
    }
}

TEST_CASE("skew files round trip", "[io]") {
    testsupport::Rng rng(613);
    SkewMatrix m = testsupport::random_skew(rng, 6, true);
    std::ostringstream out;
    write_skew(out, m);
    std::istringstream in(out.str());
    SkewMatrix back = read_skew(in);
    REQUIRE(back.labels() == m.labels());
    REQUIRE(back.upper() == m.upper());
}

TEST_CASE("general matchgate files round trip", "[io]") {
    testsupport::Rng rng(617);
    GeneralMatchgate g = testsupport::random_general_matchgate(rng);
    std::ostringstream out;
    write_general_matchgate(out, g);
    std::istringstream in(out.str());
    GeneralMatchgate back = read_general_matchgate(in);
    REQUIRE(back.nodes == g.nodes);
    REQUIRE(back.edges == g.edges);
    REQUIRE(back.inputs == g.inputs);
    REQUIRE(back.outputs == g.outputs);
    REQUIRE(back.omittable == g.omittable);
}

TEST_CASE("readers give line-numbered diagnostics", "[io]") {
    auto expect_error_at = [](const std::string& text, std::size_t line) {
        std::istringstream in(text);
        try {
            read_matchgate(in, "bad.mg");
            FAIL("expected FileError");
        } catch (const FileError& e) {
            REQUIRE(e.line() == line);
            REQUIRE(std::string(e.what()).find("bad.mg:") == 0);
        }
    };
    expect_error_at("nonsense v9\n", 1);
    expect_error_at("matchgate v1\nnode 1\nnode 2\nedge 1 2 0\n", 4);
    expect_error_at("matchgate v1\nnode 1\nedge 1 5 2/3\n", 3);
    expect_error_at("matchgate v1\nnode 1\nnode 2\nedge 1 2 2//3\n", 4);

    std::istringstream in("sig v1 arity 2\n01 1\n01 2\n");
    try {
        read_signature(in, "dup.sig");
        FAIL("expected FileError");
    } catch (const FileError& e) {
        REQUIRE(e.line() == 3);
    }
}

TEST_CASE("comments and blank lines are ignored", "[io]") {
    std::istringstream in(
        "matchgate v1\n# a comment\n\nnode 1\nnode 2   # trailing\nedge 1 2 4\n"
        "rotation 1: 2\nrotation 2: 1\nouter 1 2\nexternal 1 2\n");
    PlaneGraph g = read_matchgate(in);
    REQUIRE(g.nodes.size() == 2);
    REQUIRE(g.weight(1, 2) == GaussianRational(4));
}

TEST_CASE("cli pipeline", "[cli]") {
    TempDir dir;
    std::ostringstream sink;

    SECTION("sig of the crossover gadget") {
        fs::path mg = dir.path / "x.mg";
        write_file_atomic(mg, render_matchgate(crossover_gadget()));
        fs::path sig = dir.path / "x.sig";
        REQUIRE(cli::cmd_sig(mg, sig, sink) == cli::kExitOk);
        REQUIRE(slurp(sig) ==
                "sig v1 arity 4\n0000 1\n0101 1\n1010 1\n1111 -1\n");
    }
    SECTION("check-mgi exit codes and report") {
        fs::path good = dir.path / "good.sig";
        write_file_atomic(good, render_signature(signature(crossover_gadget())));
        REQUIRE(cli::cmd_check_mgi(good, sink) == cli::kExitOk);

        SignatureVector ones = SignatureVector::zeros(2);
        for (std::uint32_t a = 0; a < 4; ++a) ones.at(a) = GaussianRational(1);
        fs::path bad = dir.path / "bad.sig";
        write_file_atomic(bad, render_signature(ones));
        std::ostringstream report;
        REQUIRE(cli::cmd_check_mgi(bad, report) == cli::kExitViolation);
        REQUIRE(report.str() == "FAIL (00, 01) residual -1\n");

        fs::path zero = dir.path / "zero.sig";
        write_file_atomic(zero, render_signature(SignatureVector::zeros(3)));
        REQUIRE(cli::cmd_check_mgi(zero, sink) == cli::kExitOk);
    }
    SECTION("gen, realize, sig round trip byte-identically") {
        for (std::uint64_t seed : {3u, 17u}) {
            fs::path gen_sig = dir.path / "g.sig";
            fs::path mg = dir.path / "g.mg";
            fs::path re_sig = dir.path / "g2.sig";
            REQUIRE(cli::cmd_gen(4, seed, gen_sig, sink) == cli::kExitOk);
            REQUIRE(cli::cmd_realize(gen_sig, mg, sink) == cli::kExitOk);
            REQUIRE(cli::cmd_sig(mg, re_sig, sink) == cli::kExitOk);
            REQUIRE(slurp(gen_sig) == slurp(re_sig));
        }
    }
    SECTION("orient produces a Pfaffian orientation file") {
        fs::path mg = dir.path / "x.mg";
        write_file_atomic(mg, render_matchgate(crossover_gadget()));
        fs::path omg = dir.path / "x.omg";
        REQUIRE(cli::cmd_orient(mg, omg, sink) == cli::kExitOk);
        std::istringstream in(slurp(omg));
        REQUIRE(verify_kasteleyn(read_oriented_matchgate(in)));
    }
    SECTION("delta prints the table and passes on the printed instance") {
        fs::path omg = dir.path / "fig.omg";
        std::ostringstream text;
        write_oriented_matchgate(text, testsupport::oriented_square_with_tips());
        write_file_atomic(omg, text.str());
        std::ostringstream report;
        REQUIRE(cli::cmd_delta(omg, 1, 2, report) == cli::kExitOk);
        REQUIRE(report.str().find("PASS") != std::string::npos);
        REQUIRE(report.str().find("0000 1100 -1") != std::string::npos);
    }
    SECTION("sym round trips through sig") {
        fs::path mg = dir.path / "s.mg";
        REQUIRE(cli::cmd_sym("1,0,1,0,1", mg, sink) == cli::kExitOk);
        fs::path sig = dir.path / "s.sig";
        REQUIRE(cli::cmd_sig(mg, sig, sink) == cli::kExitOk);
        SymmetricSignature z;
        for (int v : {1, 0, 1, 0, 1}) z.entries.push_back(GaussianRational(v));
        REQUIRE(slurp(sig) == render_signature(dense(z)));
    }
    SECTION("char writes the two split signatures") {
        GeneralMatchgate g;
        g.add_node(1);
        g.add_node(2);
        g.add_edge(1, 2, GaussianRational(6));
        g.inputs = {1};
        g.outputs = {2};
        fs::path gmg = dir.path / "e.gmg";
        std::ostringstream text;
        write_general_matchgate(text, g);
        write_file_atomic(gmg, text.str());
        std::ostringstream report;
        REQUIRE(cli::cmd_char(gmg, (dir.path / "e").string(), report) == cli::kExitOk);
        std::istringstream s1(slurp(dir.path / "e.g1.sig"));
        std::istringstream s2(slurp(dir.path / "e.g2.sig"));
        SignatureVector g1 = read_signature(s1);
        SignatureVector g2 = read_signature(s2);
        CharacterVector chi = character_vector(g);
        for (std::uint32_t a = 0; a < 4; ++a) REQUIRE(chi.naked[a] == g1.at(a) + g2.at(a));
    }
    SECTION("run dispatches and maps errors to exit codes") {
        fs::path missing = dir.path / "missing.sig";
        const char* argv1[] = {"mgate", "check-mgi", missing.c_str()};
        REQUIRE(cli::run(3, argv1, sink) == cli::kExitBadInput);

        SignatureVector ones = SignatureVector::zeros(2);
        for (std::uint32_t a = 0; a < 4; ++a) ones.at(a) = GaussianRational(1);
        fs::path bad = dir.path / "ones.sig";
        write_file_atomic(bad, render_signature(ones));
        std::string bad_str = bad.string();
        const char* argv2[] = {"mgate", "realize", bad_str.c_str()};
        REQUIRE(cli::run(3, argv2, sink) == cli::kExitViolation);

        const char* argv3[] = {"mgate", "gen", "--arity", "3", "--seed", "5"};
        REQUIRE(cli::run(6, argv3, sink) == cli::kExitOk);
    }
}
