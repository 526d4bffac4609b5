#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "glai/dataset.hpp"
#include "glai/errors.hpp"

using namespace glai;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "glai_dataset_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

void put_be32(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>((v >> 24) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>(v & 0xff));
}

std::string idx_images(std::uint32_t magic, std::uint32_t n, std::uint32_t rows,
                       std::uint32_t cols, bool truncate = false) {
    std::string s;
    put_be32(s, magic);
    put_be32(s, n);
    put_be32(s, rows);
    put_be32(s, cols);
    std::size_t pixels = static_cast<std::size_t>(n) * rows * cols;
    if (truncate && pixels > 0) pixels -= 1;
    s.append(pixels, '\0');
    if (!s.empty() && n > 0 && !truncate) {
        s[16] = static_cast<char>(255);  // first pixel of the first image
    }
    return s;
}

std::string idx_labels(std::uint32_t magic, std::uint32_t n) {
    std::string s;
    put_be32(s, magic);
    put_be32(s, n);
    for (std::uint32_t i = 0; i < n; ++i) {
        s.push_back(static_cast<char>(i % 10));
    }
    return s;
}

CsvSchema classification_schema(std::size_t label_col) {
    CsvSchema schema;
    schema.task = Task::classification;
    schema.label_columns = {label_col};
    return schema;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("csv: three rows with two features and a label") {
    const fs::path p = temp_file("basic.csv");
    write_file(p, "1.0,2.0,0\n3.5,-1.25,1\n0,0,2\n");
    const Dataset ds = load_csv(p.string(), classification_schema(2));
    CHECK(ds.size() == 3);
    CHECK(ds.input_dim == 2);
    CHECK(ds.num_classes == 3);
    CHECK(ds.inputs[1] == Vector{3.5, -1.25});
    CHECK(ds.class_targets == std::vector<int>{0, 1, 2});
}

TEST_CASE("csv: optional header row") {
    const fs::path p = temp_file("header.csv");
    write_file(p, "x0,x1,label\n1,2,0\n");
    CsvSchema schema = classification_schema(2);
    schema.has_header = true;
    const Dataset ds = load_csv(p.string(), schema);
    CHECK(ds.size() == 1);
}

TEST_CASE("csv: empty file is an error") {
    const fs::path p = temp_file("empty.csv");
    write_file(p, "");
    CHECK_THROWS_AS(load_csv(p.string(), classification_schema(2)), ParseError);
}

TEST_CASE("csv: unparsable field names the row") {
    const fs::path p = temp_file("bad.csv");
    write_file(p, "1.0,2.0,0\nabc,1.0,1\n");
    try {
        load_csv(p.string(), classification_schema(2));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("csv: inconsistent width is an error") {
    const fs::path p = temp_file("width.csv");
    write_file(p, "1,2,0\n1,2,3,0\n");
    CHECK_THROWS_AS(load_csv(p.string(), classification_schema(2)), ParseError);
}

TEST_CASE("csv: missing file is an io error") {
    CHECK_THROWS_AS(load_csv("/nonexistent/nope.csv", classification_schema(0)), IoError);
}

TEST_CASE("csv: regression with two target columns") {
    const fs::path p = temp_file("reg.csv");
    write_file(p, "1,2,0.5,0.25\n3,4,-1,2\n");
    CsvSchema schema;
    schema.task = Task::regression;
    schema.label_columns = {2, 3};
    const Dataset ds = load_csv(p.string(), schema);
    CHECK(ds.input_dim == 2);
    CHECK(ds.target_dim() == 2);
    CHECK(ds.value_targets[1] == Vector{-1.0, 2.0});
}

TEST_CASE("csv: save and reload round trip") {
    const Dataset ds = gen_teacher(5, Architecture{3, 4, 2}, 20, 0.0, Task::classification);
    const fs::path p = temp_file("roundtrip.csv");
    save_csv(ds, p.string());
    const Dataset back = load_csv(p.string(), classification_schema(3));
    REQUIRE(back.size() == ds.size());
    CHECK(back.inputs == ds.inputs);
    CHECK(back.class_targets == ds.class_targets);
}

TEST_CASE("idx: ten 28x28 images") {
    const fs::path imgs = temp_file("imgs.idx");
    const fs::path labs = temp_file("labs.idx");
    write_file(imgs, idx_images(0x00000803u, 10, 28, 28));
    write_file(labs, idx_labels(0x00000801u, 10));
    const Dataset ds = load_idx(imgs.string(), labs.string());
    CHECK(ds.size() == 10);
    CHECK(ds.input_dim == 784);
    CHECK(ds.task == Task::classification);
    CHECK(ds.inputs[0][0] == 1.0);  // 255 scaled
    CHECK(ds.inputs[0][1] == 0.0);
    CHECK(ds.class_targets[3] == 3);
}

TEST_CASE("idx: bad magic") {
    const fs::path imgs = temp_file("badmagic.idx");
    const fs::path labs = temp_file("labs2.idx");
    write_file(imgs, idx_images(0x00000000u, 10, 28, 28));
    write_file(labs, idx_labels(0x00000801u, 10));
    try {
        load_idx(imgs.string(), labs.string());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("bad magic") != std::string::npos);
    }
}

TEST_CASE("idx: count mismatch") {
    const fs::path imgs = temp_file("imgs3.idx");
    const fs::path labs = temp_file("labs3.idx");
    write_file(imgs, idx_images(0x00000803u, 10, 28, 28));
    write_file(labs, idx_labels(0x00000801u, 9));
    try {
        load_idx(imgs.string(), labs.string());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("count mismatch") != std::string::npos);
    }
}

TEST_CASE("idx: truncated image payload") {
    const fs::path imgs = temp_file("imgs4.idx");
    const fs::path labs = temp_file("labs4.idx");
    write_file(imgs, idx_images(0x00000803u, 10, 28, 28, /*truncate=*/true));
    write_file(labs, idx_labels(0x00000801u, 10));
    try {
        load_idx(imgs.string(), labs.string());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("truncated") != std::string::npos);
    }
}

TEST_CASE("gen_teacher: zero-noise regression reproduces the teacher exactly") {
    const Architecture arch{4, 6, 2};
    const std::uint64_t seed = 17;
    const Dataset ds = gen_teacher(seed, arch, 50, 0.0, Task::regression);
    const MlpModel teacher = new_mlp(arch, seed);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(forward(teacher, ds.inputs[i]) == ds.value_targets[i]);
    }
}

TEST_CASE("gen_teacher: deterministic per seed") {
    const Architecture arch{3, 5, 3};
    const Dataset a = gen_teacher(9, arch, 30, 0.1, Task::regression);
    const Dataset b = gen_teacher(9, arch, 30, 0.1, Task::regression);
    CHECK(a.inputs == b.inputs);
    CHECK(a.value_targets == b.value_targets);
}

TEST_CASE("gen_teacher: classification labels land in [0, k)") {
    const Dataset ds = gen_teacher(21, Architecture{4, 8, 3}, 200, 0.0, Task::classification);
    CHECK(ds.num_classes == 3);
    for (int cls : ds.class_targets) {
        CHECK(cls >= 0);
        CHECK(cls < 3);
    }
}

TEST_CASE("gen_teacher: invalid inputs") {
    CHECK_THROWS_AS(gen_teacher(1, Architecture{4}, 10, 0.0, Task::regression), ConfigError);
    CHECK_THROWS_AS(gen_teacher(1, Architecture{4, 2}, 0, 0.0, Task::regression), ConfigError);
}

TEST_CASE("split: 10 samples at 0.2 gives 8/2") {
    const Dataset ds = gen_teacher(2, Architecture{2, 3, 2}, 10, 0.0, Task::classification);
    const Split sp = split_dataset(ds, 0.2, 4);
    CHECK(sp.train.size() == 8);
    CHECK(sp.validation.size() == 2);
}

TEST_CASE("split: deterministic per seed") {
    const Dataset ds = gen_teacher(2, Architecture{2, 3, 2}, 25, 0.0, Task::classification);
    const Split a = split_dataset(ds, 0.3, 7);
    const Split b = split_dataset(ds, 0.3, 7);
    CHECK(a.train.inputs == b.train.inputs);
    CHECK(a.validation.inputs == b.validation.inputs);
}

TEST_CASE("split: fraction bounds") {
    const Dataset ds = gen_teacher(2, Architecture{2, 3, 2}, 10, 0.0, Task::classification);
    CHECK_THROWS_AS(split_dataset(ds, 1.0, 1), ConfigError);
    CHECK_THROWS_AS(split_dataset(ds, 0.0, 1), ConfigError);
}

TEST_CASE("split: partitions the source") {
    const Dataset ds = gen_teacher(3, Architecture{2, 3, 2}, 23, 0.0, Task::classification);
    const Split sp = split_dataset(ds, 0.4, 11);
    CHECK(sp.train.size() + sp.validation.size() == ds.size());

    std::vector<Vector> combined = sp.train.inputs;
    combined.insert(combined.end(), sp.validation.inputs.begin(), sp.validation.inputs.end());
    std::vector<Vector> source = ds.inputs;
    std::sort(combined.begin(), combined.end());
    std::sort(source.begin(), source.end());
    CHECK(combined == source);
}

}  // TEST_SUITE
