/*
 * Copyright 2026 The rosbl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <filesystem>
#include <random>

#include "rosbl/core.hpp"
#include "rosbl/csv.hpp"
#include "test_util.hpp"

using namespace rosbl;

TEST_CASE("partition_uniform splits into contiguous equal blocks") {
    const auto b = partition_uniform(160, 8);
    CHECK(b.num_groups() == 20);
    CHECK(b.num_coefficients() == 160);
    // Coefficient 9 (1-based) is coefficient 8 here and sits in the second block.
    CHECK(b.group_of(8) == 1);
    CHECK(b.is_contiguous());

    const auto single = partition_uniform(4, 4);
    CHECK(single.num_groups() == 1);
    CHECK(single.group_size(0) == 4);

    CHECK_THROWS_AS(partition_uniform(6, 4), StructureError);
    CHECK_THROWS_AS(partition_uniform(6, 0), StructureError);
}

TEST_CASE("from_groups validates the partition") {
    const auto b = BlockStructure::from_groups({{0, 2}, {1, 3}});
    CHECK(b.num_groups() == 2);
    CHECK(b.group_of(2) == 0);
    CHECK(!b.is_contiguous());

    CHECK_THROWS_AS(BlockStructure::from_groups({}), StructureError);
    CHECK_THROWS_AS(BlockStructure::from_groups({{0}, {}}), StructureError);
    CHECK_THROWS_AS(BlockStructure::from_groups({{0, 1}, {1}}), StructureError);
    CHECK_THROWS_AS(BlockStructure::from_groups({{0, 5}}), StructureError);
}

TEST_CASE("every coefficient belongs to exactly one group") {
    std::mt19937_64 gen(7);
    for (Index len : {1, 2, 3, 5, 8}) {
        const auto b = partition_uniform(len * 7, len);
        std::vector<int> seen(static_cast<std::size_t>(b.num_coefficients()), 0);
        Index total = 0;
        for (Index g = 0; g < b.num_groups(); ++g) {
            total += b.group_size(g);
            for (Index j : b.members(g)) {
                ++seen[static_cast<std::size_t>(j)];
                CHECK(b.group_of(j) == g);
            }
        }
        CHECK(total == b.num_coefficients());
        for (int s : seen) CHECK(s == 1);
    }
}

TEST_CASE("expand and trailing singletons") {
    const auto b = partition_uniform(6, 3);
    Vector per_group(2);
    per_group << 1.5, -2.0;
    const Vector e = b.expand(per_group);
    CHECK(e.head(3).isConstant(1.5));
    CHECK(e.tail(3).isConstant(-2.0));
    CHECK_THROWS_AS(b.expand(Vector::Ones(3)), StructureError);

    const auto ext = b.with_trailing_singletons(4);
    CHECK(ext.num_groups() == 6);
    CHECK(ext.num_coefficients() == 10);
    CHECK(ext.group_of(9) == 5);
}

TEST_CASE("Problem::validate names the mismatched dimension") {
    Problem p{Matrix::Ones(3, 2), Matrix::Ones(4, 6), partition_uniform(6, 2), std::nullopt};
    try {
        p.validate();
        FAIL("expected a StructureError");
    } catch (const StructureError& e) {
        CHECK(std::string(e.what()).find("n mismatch") != std::string::npos);
    }
    p.Y = Matrix::Ones(4, 2);
    CHECK_NOTHROW(p.validate());
    p.blocks = partition_uniform(4, 2);
    CHECK_THROWS_AS(p.validate(), StructureError);
}

TEST_CASE("CSV parsing") {
    const Matrix M = parse_matrix_csv("1,2\n3,4");
    REQUIRE(M.rows() == 2);
    REQUIRE(M.cols() == 2);
    CHECK(M(0, 0) == 1.0);
    CHECK(M(0, 1) == 2.0);
    CHECK(M(1, 0) == 3.0);
    CHECK(M(1, 1) == 4.0);

    const Matrix S = parse_matrix_csv("1e-3, -2.5E+2\r\n+7,0\n\n");
    CHECK(S(0, 0) == 1e-3);
    CHECK(S(0, 1) == -250.0);
    CHECK(S(1, 0) == 7.0);

    try {
        parse_matrix_csv("1,2\n3", "f.csv");
        FAIL("expected a ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_matrix_csv("1,x\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix_csv("1,,2\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix_csv(""), ParseError);
    CHECK_THROWS_AS(parse_matrix_csv("\n\n"), ParseError);
}

TEST_CASE("CSV round trip is exact") {
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<int> exponent(-300, 300);
    const auto dir = std::filesystem::temp_directory_path() / "rosbl_csv_roundtrip";
    std::filesystem::create_directories(dir);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix M = testing::random_matrix(1 + rep % 5, 1 + rep % 7, gen);
        for (Index k = 0; k < M.size(); ++k) M.data()[k] *= std::pow(10.0, exponent(gen));
        const auto path = dir / "m.csv";
        write_matrix_csv(M, path);
        const Matrix R = read_matrix_csv(path);
        REQUIRE(R.rows() == M.rows());
        REQUIRE(R.cols() == M.cols());
        CHECK((R.array() == M.array()).all());
        CHECK(format_matrix_csv(R) == format_matrix_csv(M));
    }
    std::filesystem::remove_all(dir);
}
