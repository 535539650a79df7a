#include <doctest.h>

#include <filesystem>
#include <map>

#include "bril/demo.hpp"
#include "bril/errors.hpp"
#include "bril/io_util.hpp"
#include "support/test_helpers.hpp"

using namespace bril;
using namespace bril::testing;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("demo_store") {

TEST_CASE("save/load round-trips bit-exactly") {
    DemoSet set = make_demoset(3);
    set.demos[1].meta["note"] = "üńíçödé ✓";
    set.demos[1].win = true;
    const std::string path = tmp_path("bril_demos_rt.jsonl");
    save_demoset(set, path);
    const DemoSet loaded = load_demoset(path);
    CHECK(loaded == set);
    CHECK(loaded.demos.size() == 3);

    SUBCASE("two saves are byte-identical") {
        CHECK(serialize_demoset(set) == serialize_demoset(set));
        const std::string first = read_text_file(path);
        save_demoset(loaded, path);
        CHECK(read_text_file(path) == first);
    }
}

TEST_CASE("header-only file yields an empty set, empty file is a schema error") {
    const DemoSet empty = parse_demoset(serialize_demoset(make_demoset(0)));
    CHECK(empty.demos.empty());
    CHECK(empty.schema == tiny_schema());
    CHECK_THROWS_AS(parse_demoset(""), SchemaError);
}

TEST_CASE("action id at action_count is a parse error naming the id") {
    DemoSet set = make_demoset(1);
    set.demos[0].pairs[0].second = set.schema.action_count;  // one past the end
    try {
        parse_demoset(serialize_demoset(set));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(std::to_string(set.schema.action_count)) !=
              std::string::npos);
        CHECK(e.line() == 2);
    }
}

TEST_CASE("malformed line carries its line number") {
    std::string text = serialize_demoset(make_demoset(2));
    text += "{not json\n";
    try {
        parse_demoset(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("state width mismatch across records is a schema error") {
    std::string text = serialize_demoset(make_demoset(1));
    text += R"({"id":"bad","outcome":"loss","unit_counts":[0,0,0,0],"meta":{},"pairs":[[[1.0,2.0],1]]})";
    text += "\n";  // 2-wide state under a 3-wide schema
    CHECK_THROWS_AS(parse_demoset(text), SchemaError);
}

TEST_CASE("duplicate ids rejected") {
    DemoSet set = make_demoset(2);
    set.demos[1].id = set.demos[0].id;
    CHECK_THROWS_AS(validate(set), SchemaError);
}

TEST_CASE("split: 10 demos, fractions (0.6,0.1,0.3) -> sizes (6,1,3)") {
    const DemoSet set = make_demoset(10);
    const std::vector<int> labels(10, 0);
    const DemoSplit s = split_per_cluster(set, labels, SplitSpec{0.6, 0.1, 0.3, 7});
    CHECK(s.train.demos.size() == 6);
    CHECK(s.val.demos.size() == 1);
    CHECK(s.test.demos.size() == 3);
}

TEST_CASE("split: fractions (1,0,0) put everything in train") {
    const DemoSet set = make_demoset(5);
    const DemoSplit s = split_per_cluster(set, {0, 0, 1, 1, -1}, SplitSpec{1.0, 0.0, 0.0, 3});
    CHECK(s.train.demos.size() == 5);
    CHECK(s.val.demos.empty());
    CHECK(s.test.demos.empty());
}

// Largest-remainder by hand for (0.6, 0.1, 0.3):
//   7 demos  -> (4.2, 0.7, 2.1) -> floors (4,0,2), leftover 1 to the
//               largest remainder 0.7 -> (4,1,2)
//   13 demos -> (7.8, 1.3, 3.9) -> floors (7,1,3), leftovers to 0.9
//               then 0.8 -> (8,1,4)
//   11 demos -> (6.6, 1.1, 3.3) -> floors (6,1,3), leftover to 0.6
//               -> (7,1,3)
TEST_CASE("split: per-cluster largest-remainder matches the hand computation") {
    const int sizes[3] = {7, 13, 11};
    DemoSet set = make_demoset(31);
    std::vector<int> labels;
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < sizes[c]; ++k) labels.push_back(c);

    const DemoSplit s = split_per_cluster(set, labels, SplitSpec{0.6, 0.1, 0.3, 11});
    auto count_by_cluster = [&](const DemoSet& subset) {
        std::map<std::string, int> index;
        for (std::size_t i = 0; i < set.demos.size(); ++i) index[set.demos[i].id] = labels[i];
        std::map<int, int> counts;
        for (const auto& d : subset.demos) counts[index[d.id]] += 1;
        return counts;
    };
    auto train = count_by_cluster(s.train), val = count_by_cluster(s.val),
         test = count_by_cluster(s.test);
    CHECK(train[0] == 4);
    CHECK(val[0] == 1);
    CHECK(test[0] == 2);
    CHECK(train[1] == 8);
    CHECK(val[1] == 1);
    CHECK(test[1] == 4);
    CHECK(train[2] == 7);
    CHECK(val[2] == 1);
    CHECK(test[2] == 3);

    SUBCASE("splits partition the input") {
        CHECK(s.train.demos.size() + s.val.demos.size() + s.test.demos.size() == set.demos.size());
        std::map<std::string, int> seen;
        for (const auto& d : s.train.demos) seen[d.id] += 1;
        for (const auto& d : s.val.demos) seen[d.id] += 1;
        for (const auto& d : s.test.demos) seen[d.id] += 1;
        for (const auto& [id, n] : seen) CHECK(n == 1);
        CHECK(seen.size() == set.demos.size());
    }
    SUBCASE("deterministic given the seed") {
        const DemoSplit again = split_per_cluster(set, labels, SplitSpec{0.6, 0.1, 0.3, 11});
        CHECK(again.train == s.train);
        CHECK(again.val == s.val);
        CHECK(again.test == s.test);
    }
}

TEST_CASE("split: exact fractions over clusters (50,30,20)") {
    DemoSet set = make_demoset(100);
    std::vector<int> labels;
    for (int k = 0; k < 50; ++k) labels.push_back(0);
    for (int k = 0; k < 30; ++k) labels.push_back(1);
    for (int k = 0; k < 20; ++k) labels.push_back(2);
    const DemoSplit s = split_per_cluster(set, labels, SplitSpec{0.6, 0.1, 0.3, 5});
    CHECK(s.train.demos.size() == 30 + 18 + 12);
    CHECK(s.val.demos.size() == 5 + 3 + 2);
    CHECK(s.test.demos.size() == 15 + 9 + 6);
}

TEST_CASE("split: label length mismatch is a contract error") {
    CHECK_THROWS_AS(split_per_cluster(make_demoset(3), {0, 0}, SplitSpec{}), ContractError);
    CHECK_THROWS_AS(split_per_cluster(make_demoset(2), {0, 0}, SplitSpec{0.5, 0.1, 0.3, 0}),
                    ContractError);
}

TEST_CASE("flatten: row count is the sum of demo lengths") {
    DemoSet set;
    set.schema = tiny_schema();
    set.demos.push_back(make_demo("a", 3, {1, 0, 0, 0}));
    set.demos.push_back(make_demo("b", 5, {0, 1, 0, 0}));
    CHECK(flatten(set).size() == 8);

    SUBCASE("behavior coordinates are appended per demo") {
        const std::vector<ReducedDescriptor> behaviors = {{{0.1, -0.2}}, {{1.5, 2.5}}};
        const auto rows = flatten(set, &behaviors);
        REQUIRE(rows.size() == 8);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            CHECK(rows[r].input.size() == 5);  // state_dim + 2
            const auto& b = r < 3 ? behaviors[0] : behaviors[1];
            CHECK(rows[r].input[3] == b.coords[0]);
            CHECK(rows[r].input[4] == b.coords[1]);
        }
    }
    SUBCASE("behavior length mismatch is a contract error") {
        const std::vector<ReducedDescriptor> behaviors = {{{0.1, -0.2}}};
        CHECK_THROWS_AS(flatten(set, &behaviors), ContractError);
    }
}

}  // TEST_SUITE
