// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little, "on-disk format is little-endian");

namespace geomflow {
namespace io {

namespace {

constexpr char kMagic[4] = {'4', 'D', 'K', '1'};

size_t dtype_size(uint32_t dtype) { return dtype == kDtypeF32 ? 4 : 1; }

void write_tensor_raw(const std::filesystem::path& path, uint32_t dtype, const std::vector<uint32_t>& dims,
                      const void* payload, size_t payload_bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(ErrorCode::MissingFile, "cannot open for writing: " + path.string());
    f.write(kMagic, 4);
    const uint32_t rank = static_cast<uint32_t>(dims.size());
    f.write(reinterpret_cast<const char*>(&dtype), 4);
    f.write(reinterpret_cast<const char*>(&rank), 4);
    for (uint32_t d : dims) f.write(reinterpret_cast<const char*>(&d), 4);
    f.write(static_cast<const char*>(payload), static_cast<std::streamsize>(payload_bytes));
    if (!f) throw IoError(ErrorCode::MissingFile, "short write: " + path.string());
}

std::vector<char> read_tensor_raw(const std::filesystem::path& path, uint32_t expected_dtype,
                                  std::vector<uint32_t>& dims) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(ErrorCode::MissingFile, "missing file: " + path.string());
    char magic[4];
    if (!f.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError(ErrorCode::BadMagic, "bad magic in " + path.string());
    uint32_t dtype = 0, rank = 0;
    if (!f.read(reinterpret_cast<char*>(&dtype), 4) || !f.read(reinterpret_cast<char*>(&rank), 4) ||
        (dtype != kDtypeF32 && dtype != kDtypeU8) || rank > 8)
        throw IoError(ErrorCode::BadHeader, "bad header in " + path.string());
    if (dtype != expected_dtype) throw IoError(ErrorCode::BadHeader, "unexpected dtype in " + path.string());
    dims.assign(rank, 0);
    for (uint32_t& d : dims)
        if (!f.read(reinterpret_cast<char*>(&d), 4)) throw IoError(ErrorCode::BadHeader, "truncated header in " + path.string());
    size_t count = 1;
    for (uint32_t d : dims) count *= d;
    const size_t expected_bytes = count * dtype_size(dtype);
    std::vector<char> payload(expected_bytes);
    f.read(payload.data(), static_cast<std::streamsize>(expected_bytes));
    if (static_cast<size_t>(f.gcount()) != expected_bytes || f.peek() != EOF)
        throw IoError(ErrorCode::PayloadMismatch, "payload length mismatch in " + path.string());
    return payload;
}

}  // namespace

void write_tensor_f32(const std::filesystem::path& path, const std::vector<uint32_t>& dims,
                      const std::vector<float>& values) {
    write_tensor_raw(path, kDtypeF32, dims, values.data(), values.size() * 4);
}

void write_tensor_u8(const std::filesystem::path& path, const std::vector<uint32_t>& dims,
                     const std::vector<uint8_t>& values) {
    write_tensor_raw(path, kDtypeU8, dims, values.data(), values.size());
}

std::vector<float> read_tensor_f32(const std::filesystem::path& path, std::vector<uint32_t>& dims) {
    const std::vector<char> raw = read_tensor_raw(path, kDtypeF32, dims);
    std::vector<float> out(raw.size() / 4);
    std::memcpy(out.data(), raw.data(), raw.size());
    return out;
}

std::vector<uint8_t> read_tensor_u8(const std::filesystem::path& path, std::vector<uint32_t>& dims) {
    const std::vector<char> raw = read_tensor_raw(path, kDtypeU8, dims);
    return {raw.begin(), raw.end()};
}

namespace {

std::string frame_name(const char* stem, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%04d", stem, i);
    return buf;
}

std::vector<float> flatten_vec3(const Vec3Grid& g) {
    std::vector<float> out;
    out.reserve(g.size() * 3);
    for (const Eigen::Vector3d& v : g.cells) {
        out.push_back(static_cast<float>(v.x()));
        out.push_back(static_cast<float>(v.y()));
        out.push_back(static_cast<float>(v.z()));
    }
    return out;
}

Vec3Grid unflatten_vec3(const std::vector<float>& v, int h, int w) {
    Vec3Grid g(h, w);
    for (size_t i = 0; i < g.size(); ++i) g.cells[i] = Eigen::Vector3d(v[3 * i], v[3 * i + 1], v[3 * i + 2]);
    return g;
}

void expect_dims(const std::vector<uint32_t>& dims, const std::vector<uint32_t>& want,
                 const std::filesystem::path& path) {
    if (dims != want) throw IoError(ErrorCode::DimMismatch, "unexpected dims in " + path.string());
}

FrameTag tag_from_string(const std::string& s, int frame) {
    if (s == "camera") return FrameTag::camera(frame);
    if (s == "world") return FrameTag::world();
    if (s == "world-normalized") return FrameTag::world_normalized();
    throw IoError(ErrorCode::ManifestParse, "unknown frame_tag '" + s + "'");
}

}  // namespace

void write_sequence(const SequenceSample& seq, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const int n = seq.frames();
    const uint32_t h = static_cast<uint32_t>(seq.height());
    const uint32_t w = static_cast<uint32_t>(seq.width());

    std::ostringstream manifest;
    manifest << "n_frames " << n << "\n";
    manifest << "height " << h << "\n";
    manifest << "width " << w << "\n";
    std::string tag = "world";
    if (!seq.point_maps.empty()) {
        switch (seq.point_maps.front().tag.kind) {
            case FrameKind::Camera: tag = "camera"; break;
            case FrameKind::World: tag = "world"; break;
            case FrameKind::WorldNormalized: tag = "world-normalized"; break;
        }
    }
    manifest << "frame_tag " << tag << "\n";
    manifest << "deformability " << (seq.deformability ? 1 : 0) << "\n";
    if (seq.norm) {
        manifest << "norm_mode " << (seq.norm->mode == NormMode::Canonical ? "canonical" : "max") << "\n";
        char buf[128];
        std::snprintf(buf, sizeof(buf), "norm_mu %.9g %.9g %.9g\n", seq.norm->mu.x(), seq.norm->mu.y(),
                      seq.norm->mu.z());
        manifest << buf;
        std::snprintf(buf, sizeof(buf), "norm_scale %.9g\n", seq.norm->scale);
        manifest << buf;
    }
    std::ofstream mf(dir / "manifest.txt", std::ios::trunc);
    mf << manifest.str();
    if (!mf) throw IoError(ErrorCode::MissingFile, "cannot write manifest in " + dir.string());
    mf.close();

    for (int i = 0; i < n; ++i) {
        write_tensor_f32(dir / frame_name("pointmap", i), {h, w, 3}, flatten_vec3(seq.point_maps[i].data));
        write_tensor_u8(dir / frame_name("mask", i), {h, w}, seq.point_maps[i].mask.cells);
    }
    for (int i = 0; i < n - 1; ++i) {
        write_tensor_f32(dir / frame_name("flow", i), {h, w, 3}, flatten_vec3(seq.flows[i].data));
        write_tensor_u8(dir / frame_name("flowmask", i), {h, w}, seq.flows[i].mask.cells);
    }
    for (int i = 0; i < n; ++i) {
        std::vector<float> pose(16, 0.0f);
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) pose[4 * r + c] = static_cast<float>(seq.poses[i].rotation(r, c));
            pose[4 * r + 3] = static_cast<float>(seq.poses[i].translation[r]);
        }
        pose[15] = 1.0f;
        write_tensor_f32(dir / frame_name("pose", i), {4, 4}, pose);
    }
    write_tensor_f32(dir / "intrinsics", {6},
                     {static_cast<float>(seq.intrinsics.fx), static_cast<float>(seq.intrinsics.fy),
                      static_cast<float>(seq.intrinsics.cx), static_cast<float>(seq.intrinsics.cy),
                      static_cast<float>(seq.intrinsics.width), static_cast<float>(seq.intrinsics.height)});
    if (seq.deformability)
        for (int i = 0; i < n - 1; ++i)
            write_tensor_u8(dir / frame_name("dynmask", i), {h, w}, (*seq.deformability)[i].cells);
}

SequenceSample read_sequence(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::ifstream mf(dir / "manifest.txt");
    if (!mf) throw IoError(ErrorCode::MissingFile, "missing manifest in " + dir.string());

    int n = -1;
    uint32_t h = 0, w = 0;
    std::string tag_str = "world";
    bool has_dyn = false;
    std::optional<NormParams> norm;
    std::string line;
    while (std::getline(mf, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "n_frames") ls >> n;
        else if (key == "height") ls >> h;
        else if (key == "width") ls >> w;
        else if (key == "frame_tag") ls >> tag_str;
        else if (key == "deformability") { int v = 0; ls >> v; has_dyn = v != 0; }
        else if (key == "norm_mode") {
            std::string mode;
            ls >> mode;
            if (!norm) norm.emplace();
            if (mode == "canonical") norm->mode = NormMode::Canonical;
            else if (mode == "max") norm->mode = NormMode::Max;
            else throw IoError(ErrorCode::ManifestParse, "unknown norm_mode '" + mode + "'");
        } else if (key == "norm_mu") {
            if (!norm) norm.emplace();
            ls >> norm->mu.x() >> norm->mu.y() >> norm->mu.z();
        } else if (key == "norm_scale") {
            if (!norm) norm.emplace();
            ls >> norm->scale;
        } else {
            throw IoError(ErrorCode::ManifestParse, "unknown manifest key '" + key + "'");
        }
        if (ls.fail()) throw IoError(ErrorCode::ManifestParse, "malformed manifest line: " + line);
    }
    if (n < 2 || h == 0 || w == 0) throw IoError(ErrorCode::ManifestParse, "manifest missing n_frames/height/width");

    // Flow file count must be exactly n-1.
    if (fs::exists(dir / frame_name("flow", n - 1)))
        throw IoError(ErrorCode::CountMismatch,
                      "flow count: found flow_" + std::to_string(n - 1) + " but manifest declares " +
                          std::to_string(n) + " frames (expect n-1 flows)");

    SequenceSample seq;
    for (int i = 0; i < n; ++i) {
        std::vector<uint32_t> dims;
        PointMap pm;
        const auto pm_path = dir / frame_name("pointmap", i);
        const std::vector<float> vals = read_tensor_f32(pm_path, dims);
        expect_dims(dims, {h, w, 3}, pm_path);
        pm.data = unflatten_vec3(vals, h, w);
        const auto mask_path = dir / frame_name("mask", i);
        const std::vector<uint8_t> mask = read_tensor_u8(mask_path, dims);
        expect_dims(dims, {h, w}, mask_path);
        pm.mask = BoolGrid(h, w);
        pm.mask.cells = mask;
        pm.tag = tag_from_string(tag_str, i);
        seq.point_maps.push_back(std::move(pm));
    }
    for (int i = 0; i < n - 1; ++i) {
        std::vector<uint32_t> dims;
        SceneFlow fl;
        const auto fl_path = dir / frame_name("flow", i);
        const std::vector<float> vals = read_tensor_f32(fl_path, dims);
        expect_dims(dims, {h, w, 3}, fl_path);
        fl.data = unflatten_vec3(vals, h, w);
        const auto mask_path = dir / frame_name("flowmask", i);
        const std::vector<uint8_t> mask = read_tensor_u8(mask_path, dims);
        expect_dims(dims, {h, w}, mask_path);
        fl.mask = BoolGrid(h, w);
        fl.mask.cells = mask;
        fl.tag = tag_from_string(tag_str, i);
        seq.flows.push_back(std::move(fl));
    }
    for (int i = 0; i < n; ++i) {
        std::vector<uint32_t> dims;
        const auto pose_path = dir / frame_name("pose", i);
        const std::vector<float> vals = read_tensor_f32(pose_path, dims);
        expect_dims(dims, {4, 4}, pose_path);
        CameraPose p;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) p.rotation(r, c) = vals[4 * r + c];
            p.translation[r] = vals[4 * r + 3];
        }
        seq.poses.push_back(p);
    }
    {
        std::vector<uint32_t> dims;
        const auto k_path = dir / "intrinsics";
        const std::vector<float> vals = read_tensor_f32(k_path, dims);
        expect_dims(dims, {6}, k_path);
        seq.intrinsics = {vals[0], vals[1], vals[2], vals[3], static_cast<int>(vals[4]), static_cast<int>(vals[5])};
    }
    if (has_dyn) {
        std::vector<BoolGrid> dyn;
        for (int i = 0; i < n - 1; ++i) {
            std::vector<uint32_t> dims;
            const auto d_path = dir / frame_name("dynmask", i);
            const std::vector<uint8_t> mask = read_tensor_u8(d_path, dims);
            expect_dims(dims, {h, w}, d_path);
            BoolGrid g(h, w);
            g.cells = mask;
            dyn.push_back(std::move(g));
        }
        seq.deformability = std::move(dyn);
    }
    seq.norm = norm;
    return seq;
}

}  // namespace io
}  // namespace geomflow
