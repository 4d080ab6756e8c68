#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "czpulse/circuit.hpp"

using namespace czpulse;

namespace {

Mat pauli_x() { return *builtin_matrix("X"); }

Mat x_on(int ion, int total) {
    const long dim = 1L << total;
    Mat full = Mat::Zero(dim, dim);
    for (long b = 0; b < dim; ++b) full(b ^ (1L << (total - 1 - ion)), b) = 1.0;
    return full;
}

Mat conjugate_by_x(const Mat& u, const std::vector<int>& ions, int total) {
    Mat layer = Mat::Identity(u.rows(), u.cols());
    for (int ion : ions) layer = x_on(ion, total) * layer;
    return layer * u * layer;
}

}  // namespace

TEST_CASE("make_multi_controlled validates its inputs") {
    CHECK_THROWS(make_multi_controlled("", pauli_x()));
    Mat bad(2, 2);
    bad << 1, 0, 0, 2;
    CHECK_THROWS(make_multi_controlled("11", bad));

    GateSpec g = make_multi_controlled("111", pauli_x());
    CHECK(g.n_controls() == 3);
    CHECK(g.control_ions == std::vector<int>{0, 1, 2});
    CHECK(g.target_ions == std::vector<int>{3});
    CHECK_FALSE(g.gauge.has_value());

    GateSpec h = make_multi_controlled("110", Mat::Identity(2, 2), "U");
    CHECK(h.controls == "110");
}

TEST_CASE("ideal unitary of the 2-controlled X is the textbook Toffoli") {
    GateSpec g = make_multi_controlled("11", pauli_x());
    Mat u = ideal_unitary(g, 3);
    Mat expected = Mat::Identity(8, 8);
    expected(6, 6) = 0;
    expected(7, 7) = 0;
    expected(6, 7) = 1;
    expected(7, 6) = 1;
    CHECK((u - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("ideal unitary honors zero controls") {
    Mat h = *builtin_matrix("H");
    GateSpec g = make_multi_controlled("10", h);
    Mat u = ideal_unitary(g, 3);
    // active only in the |e g> control sector: basis columns 4 and 5
    for (long col = 0; col < 8; ++col) {
        const bool active = ((col >> 2) & 1) == 1 && ((col >> 1) & 1) == 0;
        if (!active) CHECK(std::abs(u(col, col) - cplx(1, 0)) < 1e-15);
    }
    CHECK(std::abs(u(4, 4) - h(0, 0)) < 1e-15);
    CHECK(std::abs(u(5, 4) - h(1, 0)) < 1e-15);
}

TEST_CASE("expand_zero_controls") {
    Mat u = *builtin_matrix("H");
    SUBCASE("zero in third position") {
        auto ex = expand_zero_controls(make_multi_controlled("110", u));
        CHECK(ex.pre_x == std::vector<int>{2});
        CHECK(ex.post_x == std::vector<int>{2});
        CHECK(ex.core.controls == "111");
    }
    SUBCASE("all ones unchanged") {
        auto ex = expand_zero_controls(make_multi_controlled("111", u));
        CHECK(ex.pre_x.empty());
        CHECK(ex.core.controls == "111");
    }
    SUBCASE("all zeros") {
        auto ex = expand_zero_controls(make_multi_controlled("000", u));
        CHECK(ex.pre_x == std::vector<int>{0, 1, 2});
        CHECK(ex.core.controls == "111");
    }
}

TEST_CASE("x-conjugated core reproduces the original gate, exhaustively to length 6") {
    Mat u = *builtin_matrix("H");
    for (int n = 1; n <= 6; ++n) {
        const int total = n + 1;
        for (unsigned long bits = 0; bits < (1UL << n); ++bits) {
            std::string controls(n, '0');
            for (int i = 0; i < n; ++i)
                if ((bits >> (n - 1 - i)) & 1UL) controls[i] = '1';
            GateSpec g = make_multi_controlled(controls, u);
            auto ex = expand_zero_controls(g);
            Mat direct = ideal_unitary(g, total);
            Mat reconstructed = conjugate_by_x(ideal_unitary(ex.core, total), ex.pre_x, total);
            CHECK((direct - reconstructed).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("cswap decomposition") {
    CHECK_THROWS(cswap_decomposition(0));

    SUBCASE("three (N+2)-Toffoli gates") {
        GateSequence seq = cswap_decomposition(3);
        REQUIRE(seq.gates.size() == 3);
        CHECK(seq.qubit_count == 5);
        for (const auto& g : seq.gates) {
            CHECK(g.n_controls() == 4);
            CHECK(g.style == GateSpec::Style::Toffoli);
            CHECK(g.all_ones());
        }
        CHECK(seq.gates[0].target_ions == std::vector<int>{4});
        CHECK(seq.gates[1].target_ions == std::vector<int>{3});
        CHECK(seq.gates[2].target_ions == std::vector<int>{4});
    }

    SUBCASE("product equals the ideal N-CSWAP over all basis states, N <= 3") {
        for (int n = 1; n <= 3; ++n) {
            Mat u = ideal_unitary(cswap_decomposition(n));
            const int total = n + 2;
            for (long b = 0; b < (1L << total); ++b) {
                bool all_ones = true;
                for (int i = 0; i < n; ++i)
                    if (!((b >> (total - 1 - i)) & 1L)) all_ones = false;
                long expect = b;
                if (all_ones) {
                    const long ba = (b >> 1) & 1L, bb = b & 1L;
                    expect = (b & ~3L) | (bb << 1) | ba;
                }
                CHECK(std::abs(u(expect, b) - cplx(1, 0)) < 1e-12);
            }
        }
    }

    SUBCASE("N=1 product equals the Fredkin matrix") {
        Mat u = ideal_unitary(cswap_decomposition(1));
        Mat fredkin = Mat::Identity(8, 8);
        fredkin(5, 5) = 0;
        fredkin(6, 6) = 0;
        fredkin(5, 6) = 1;
        fredkin(6, 5) = 1;
        CHECK((u - fredkin).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("gate sequence and matrix table files") {
    const std::string table_path = "test_table.txt";
    const std::string gates_path = "test_gates.txt";
    {
        std::ofstream t(table_path);
        t << "# one custom unitary\n";
        t << "matrix U0 1\n";
        t << "0 0 0 -1\n";
        t << "0 -1 0 0\n";  // -iX
        std::ofstream g(gates_path);
        g << "# two gates\n111 U0\n110 X\n";
    }
    auto table = read_matrix_table_file(table_path);
    REQUIRE(table.count("U0") == 1);
    GateSequence seq = read_gate_sequence_file(gates_path, table);
    REQUIRE(seq.gates.size() == 2);
    CHECK(seq.qubit_count == 4);
    CHECK(seq.gates[0].target_label == "U0");
    CHECK(seq.gates[1].controls == "110");

    std::ofstream(gates_path) << "";
    CHECK_THROWS(read_gate_sequence_file(gates_path, table));
}
