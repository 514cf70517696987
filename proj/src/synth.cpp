// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/synth.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace geomflow {
namespace synth {

namespace {

constexpr double kRayMin = 1e-6;
constexpr double kRayMax = 1e4;

struct Hit {
    double t = std::numeric_limits<double>::infinity();
    int mover = -1;  // -1 = background
    bool valid() const { return std::isfinite(t); }
};

bool intersect_plane(const Plane& pl, const Eigen::Vector3d& o, const Eigen::Vector3d& d, double& t) {
    const double denom = pl.normal.dot(d);
    if (std::abs(denom) < 1e-12) return false;
    t = (pl.offset - pl.normal.dot(o)) / denom;
    return t > kRayMin && t < kRayMax;
}

bool intersect_aabb(const Eigen::Vector3d& center, const Eigen::Vector3d& half, const Eigen::Vector3d& o,
                    const Eigen::Vector3d& d, double& t) {
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        const double lo = center[a] - half[a], hi = center[a] + half[a];
        if (std::abs(d[a]) < 1e-15) {
            if (o[a] < lo || o[a] > hi) return false;
            continue;
        }
        double ta = (lo - o[a]) / d[a];
        double tb = (hi - o[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    t = (t0 > kRayMin) ? t0 : t1;
    return t > kRayMin && t < kRayMax;
}

bool intersect_sphere(const Eigen::Vector3d& center, double radius, const Eigen::Vector3d& o,
                      const Eigen::Vector3d& d, double& t) {
    const Eigen::Vector3d oc = o - center;
    const double b = oc.dot(d);
    const double c = oc.squaredNorm() - radius * radius;
    const double disc = b * b - c;  // d is unit length
    if (disc < 0.0) return false;
    const double sq = std::sqrt(disc);
    t = -b - sq;
    if (t <= kRayMin) t = -b + sq;
    return t > kRayMin && t < kRayMax;
}

Hit cast(const SceneConfig& config, int frame, const Eigen::Vector3d& o, const Eigen::Vector3d& d) {
    Hit best;
    double t;
    for (const Plane& pl : config.planes)
        if (intersect_plane(pl, o, d, t) && t < best.t) best = {t, -1};
    for (const Box& bx : config.boxes)
        if (intersect_aabb(bx.center, bx.half, o, d, t) && t < best.t) best = {t, -1};
    for (size_t m = 0; m < config.movers.size(); ++m) {
        const Mover& mv = config.movers[m];
        const Eigen::Vector3d c = mv.center_at(frame);
        bool hit = false;
        if (mv.shape == MoverShape::Sphere) {
            hit = intersect_sphere(c, mv.radius, o, d, t);
        } else {
            // oriented box: intersect in the mover's local frame
            const Eigen::Matrix3d rt = mv.rotation_at(frame).transpose();
            const Eigen::Vector3d ol = rt * (o - c);
            const Eigen::Vector3d dl = rt * d;
            hit = intersect_aabb(Eigen::Vector3d::Zero(), mv.half, ol, dl, t);
        }
        if (hit && t < best.t) best = {t, static_cast<int>(m)};
    }
    return best;
}

CameraPose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target) {
    const Eigen::Vector3d forward = (target - eye).normalized();
    Eigen::Vector3d down(0, 1, 0);
    Eigen::Vector3d right = down.cross(forward);
    if (right.norm() < 1e-9) right = Eigen::Vector3d(1, 0, 0);
    right.normalize();
    down = forward.cross(right);
    CameraPose p;
    p.rotation.col(0) = right;
    p.rotation.col(1) = down;
    p.rotation.col(2) = forward;
    p.translation = eye;
    return p;
}

std::vector<double> parse_numbers(const std::string& value, size_t expected, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.size() != expected)
        throw std::invalid_argument("scene config: key '" + key + "' expects " + std::to_string(expected) +
                                    " comma-separated numbers");
    return out;
}

Eigen::Vector3d vec3(const std::vector<double>& v, size_t i) { return {v[i], v[i + 1], v[i + 2]}; }

}  // namespace

Eigen::Matrix3d Mover::rotation_at(int frame) const {
    const double speed = ang_vel.norm();
    if (speed == 0.0) return Eigen::Matrix3d::Identity();
    return Eigen::AngleAxisd(speed * frame, ang_vel / speed).toRotationMatrix();
}

Eigen::Vector3d Mover::advance(const Eigen::Vector3d& p, int frame) const {
    const Eigen::Vector3d local = rotation_at(frame).transpose() * (p - center_at(frame));
    return rotation_at(frame + 1) * local + center_at(frame + 1);
}

SceneConfig parse_scene_config(const std::string& text) {
    SceneConfig cfg;
    cfg.planes.clear();
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const size_t a = s.find_first_not_of(" \t\r");
            const size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        if (key == "resolution") {
            const size_t x = value.find('x');
            if (x == std::string::npos) throw std::invalid_argument("scene config: resolution must be HxW");
            cfg.height = std::stoi(value.substr(0, x));
            cfg.width = std::stoi(value.substr(x + 1));
        } else if (key == "frames") {
            cfg.frames = std::stoi(value);
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key == "trajectory") {
            if (value == "static")
                cfg.trajectory = Trajectory::Static;
            else if (value == "orbit")
                cfg.trajectory = Trajectory::Orbit;
            else if (value == "dolly")
                cfg.trajectory = Trajectory::Dolly;
            else
                throw std::invalid_argument("scene config: unknown trajectory '" + value + "'");
        } else if (key == "orbit_radius") {
            cfg.orbit_radius = std::stod(value);
        } else if (key == "orbit_height") {
            cfg.orbit_height = std::stod(value);
        } else if (key == "orbit_step") {
            cfg.orbit_step = std::stod(value);
        } else if (key == "orbit_phase") {
            cfg.orbit_phase = std::stod(value);
        } else if (key == "dolly_start") {
            cfg.dolly_start = std::stod(value);
        } else if (key == "dolly_speed") {
            cfg.dolly_speed = std::stod(value);
        } else if (key == "eye") {
            cfg.static_eye = vec3(parse_numbers(value, 3, key), 0);
        } else if (key == "target") {
            cfg.target = vec3(parse_numbers(value, 3, key), 0);
        } else if (key == "plane") {
            const auto v = parse_numbers(value, 4, key);
            cfg.planes.push_back({vec3(v, 0).normalized(), v[3]});
        } else if (key == "box") {
            const auto v = parse_numbers(value, 6, key);
            cfg.boxes.push_back({vec3(v, 0), vec3(v, 3)});
        } else if (key == "mover_sphere") {
            const auto v = parse_numbers(value, 10, key);
            Mover m;
            m.shape = MoverShape::Sphere;
            m.center = vec3(v, 0);
            m.radius = v[3];
            m.lin_vel = vec3(v, 4);
            m.ang_vel = vec3(v, 7);
            cfg.movers.push_back(m);
        } else if (key == "mover_box") {
            const auto v = parse_numbers(value, 12, key);
            Mover m;
            m.shape = MoverShape::Box;
            m.center = vec3(v, 0);
            m.half = vec3(v, 3);
            m.lin_vel = vec3(v, 6);
            m.ang_vel = vec3(v, 9);
            cfg.movers.push_back(m);
        } else {
            throw std::invalid_argument("scene config: unknown key '" + key + "'");
        }
    }
    if (cfg.frames < 2) throw std::invalid_argument("scene config: frames must be >= 2");
    if (cfg.planes.empty() && cfg.boxes.empty())
        throw std::invalid_argument("scene config: at least one background primitive required");
    return cfg;
}

SceneConfig default_scene(uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    SceneConfig cfg;
    cfg.seed = seed;
    cfg.trajectory = Trajectory::Orbit;
    cfg.orbit_radius = 7.0 + uni(rng);
    cfg.orbit_height = -1.0 + 0.5 * uni(rng);
    cfg.orbit_step = 0.12 + 0.04 * uni(rng);
    cfg.orbit_phase = M_PI * uni(rng);
    cfg.planes.push_back({Eigen::Vector3d(0, 1, 0), 2.0});  // ground (y-down world)
    const int n_boxes = 1 + (rng() % 2);
    for (int i = 0; i < n_boxes; ++i)
        cfg.boxes.push_back({Eigen::Vector3d(2.0 * uni(rng), 0.8 + 0.5 * uni(rng), 2.0 * uni(rng)),
                             Eigen::Vector3d(0.4 + 0.2 * uni(rng), 0.6 + 0.3 * uni(rng), 0.4 + 0.2 * uni(rng))});
    const int n_movers = 1 + (rng() % 3);
    for (int i = 0; i < n_movers; ++i) {
        Mover m;
        m.shape = (rng() % 2) ? MoverShape::Sphere : MoverShape::Box;
        m.center = Eigen::Vector3d(1.5 * uni(rng), -0.5 + 0.5 * uni(rng), 1.5 * uni(rng));
        m.radius = 0.5 + 0.2 * uni(rng);
        m.half = Eigen::Vector3d(0.4 + 0.15 * uni(rng), 0.4 + 0.15 * uni(rng), 0.4 + 0.15 * uni(rng));
        m.lin_vel = 0.12 * Eigen::Vector3d(uni(rng), uni(rng), uni(rng));
        m.ang_vel = 0.15 * Eigen::Vector3d(uni(rng), uni(rng), uni(rng));
        cfg.movers.push_back(m);
    }
    return cfg;
}

CameraPose camera_pose_at(const SceneConfig& config, int frame) {
    switch (config.trajectory) {
        case Trajectory::Static:
            return look_at(config.static_eye, config.target);
        case Trajectory::Orbit: {
            const double phi = config.orbit_phase + frame * config.orbit_step;
            const Eigen::Vector3d eye =
                config.target + Eigen::Vector3d(config.orbit_radius * std::cos(phi), config.orbit_height,
                                                config.orbit_radius * std::sin(phi));
            return look_at(eye, config.target);
        }
        case Trajectory::Dolly: {
            const Eigen::Vector3d eye =
                config.target + Eigen::Vector3d(0.3, -0.8, config.dolly_start + frame * config.dolly_speed);
            return look_at(eye, config.target);
        }
    }
    throw std::logic_error("camera_pose_at: bad trajectory");
}

CameraIntrinsics make_intrinsics(const SceneConfig& config) {
    CameraIntrinsics K;
    K.width = config.width;
    K.height = config.height;
    K.fx = K.fy = 0.8 * config.width;
    K.cx = config.width / 2.0;
    K.cy = config.height / 2.0;
    return K;
}

SynthResult generate(const SceneConfig& config) {
    if (config.frames < 2) throw std::invalid_argument("generate: frames must be >= 2");
    if (config.planes.empty() && config.boxes.empty())
        throw std::invalid_argument("generate: no background primitives");
    const int n = config.frames, h = config.height, w = config.width;
    const CameraIntrinsics K = make_intrinsics(config);

    std::vector<CameraPose> raw;
    for (int i = 0; i < n; ++i) raw.push_back(camera_pose_at(config, i));
    const Eigen::Matrix3d r0t = raw[0].rotation.transpose();
    const Eigen::Vector3d t0 = raw[0].translation;
    std::vector<CameraPose> canon;
    for (const CameraPose& p : raw) canon.push_back({r0t * p.rotation, r0t * (p.translation - t0)});

    SynthResult out;
    out.world.poses = canon;
    out.world.intrinsics = K;
    out.camera.poses = raw;
    out.camera.intrinsics = K;
    std::vector<BoolGrid> dyn;

    long long total_hits = 0;
    // World hit position and the hit's owner, kept across frames for flows.
    for (int i = 0; i < n; ++i) {
        PointMap cam_pm, world_pm;
        cam_pm.data = Vec3Grid(h, w, Eigen::Vector3d::Zero());
        cam_pm.mask = BoolGrid(h, w, 0);
        cam_pm.tag = FrameTag::camera(i);
        world_pm = cam_pm;
        world_pm.tag = FrameTag::world();
        Grid<int> owner(h, w, -1);
        Vec3Grid hits(h, w, Eigen::Vector3d::Zero());

        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                const Eigen::Vector3d dir_cam =
                    Eigen::Vector3d((c + 0.5 - K.cx) / K.fx, (r + 0.5 - K.cy) / K.fy, 1.0).normalized();
                const Eigen::Vector3d o = raw[i].translation;
                const Eigen::Vector3d d = raw[i].rotation * dir_cam;
                const Hit hit = cast(config, i, o, d);
                if (!hit.valid()) continue;
                const Eigen::Vector3d p = o + hit.t * d;
                hits.at(r, c) = p;
                owner.at(r, c) = hit.mover;
                cam_pm.data.at(r, c) = raw[i].to_camera(p);
                cam_pm.mask.at(r, c) = 1;
                world_pm.data.at(r, c) = r0t * (p - t0);
                world_pm.mask.at(r, c) = 1;
                ++total_hits;
            }
        }

        if (i < n - 1) {
            SceneFlow cam_fl, world_fl;
            cam_fl.data = Vec3Grid(h, w, Eigen::Vector3d::Zero());
            cam_fl.mask = BoolGrid(h, w, 0);
            cam_fl.tag = FrameTag::camera(i);
            world_fl = cam_fl;
            world_fl.tag = FrameTag::world();
            BoolGrid dmask(h, w, 0);
            for (int r = 0; r < h; ++r) {
                for (int c = 0; c < w; ++c) {
                    if (!cam_pm.mask.at(r, c)) continue;
                    const Eigen::Vector3d p = hits.at(r, c);
                    Eigen::Vector3d p_next = p;
                    if (owner.at(r, c) >= 0) {
                        p_next = config.movers[owner.at(r, c)].advance(p, i);
                        dmask.at(r, c) = 1;
                    }
                    cam_fl.data.at(r, c) = raw[i + 1].to_camera(p_next) - raw[i].to_camera(p);
                    cam_fl.mask.at(r, c) = 1;
                    world_fl.data.at(r, c) = r0t * (p_next - p);
                    world_fl.mask.at(r, c) = 1;
                }
            }
            out.camera.flows.push_back(std::move(cam_fl));
            out.world.flows.push_back(std::move(world_fl));
            dyn.push_back(std::move(dmask));
        }
        out.camera.point_maps.push_back(std::move(cam_pm));
        out.world.point_maps.push_back(std::move(world_pm));
        out.owners.push_back(std::move(owner));
    }
    if (total_hits == 0) throw std::invalid_argument("generate: no visible geometry (all rays miss)");
    out.camera.deformability = dyn;
    out.world.deformability = dyn;
    return out;
}

SequenceSample perturb(const SequenceSample& seq, const NoiseSpec& spec, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SequenceSample out = seq;
    for (PointMap& pm : out.point_maps) {
        for (size_t i = 0; i < pm.data.size(); ++i) {
            if (!pm.mask.cells[i]) continue;
            Eigen::Vector3d p = pm.data.cells[i];
            if (spec.point_sigma > 0.0)
                p += spec.point_sigma * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
            pm.data.cells[i] = spec.similarity_scale * p + spec.similarity_shift;
        }
    }
    for (SceneFlow& fl : out.flows) {
        for (size_t i = 0; i < fl.data.size(); ++i) {
            if (!fl.mask.cells[i]) continue;
            Eigen::Vector3d v = fl.data.cells[i];
            if (spec.flow_sigma > 0.0)
                v += spec.flow_sigma * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
            fl.data.cells[i] = spec.similarity_scale * v;
        }
    }
    for (CameraPose& p : out.poses)
        p.translation = spec.similarity_scale * p.translation + spec.similarity_shift;
    return out;
}

}  // namespace synth
}  // namespace geomflow
