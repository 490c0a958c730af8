#pragma once

#include <rehab/capture.hpp>
#include <rehab/engine.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace rehab::testing {

inline SkeletonFrame hand_frame(std::int64_t ts, Vec3 hand, HandState state, bool tracked = true) {
    SkeletonFrame f;
    f.timestamp_us = ts;
    f.tracked = tracked;
    f.right_hand_state = state;
    f.joints.emplace(JointId::HandRight, hand);
    return f;
}

inline ValidFrame valid(SkeletonFrame f) { return std::get<ValidFrame>(validate_frame(std::move(f), std::nullopt)); }

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 gen{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() / ("rehab-test-" + std::to_string(gen()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string fixture_path(const std::string& name) {
    const char* dir = std::getenv("REHAB_FIXTURES");
#ifdef REHAB_FIXTURES_DIR
    if (!dir) dir = REHAB_FIXTURES_DIR;
#endif
    return std::string(dir ? dir : "tests/fixtures") + "/" + name;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << s;
}

}  // namespace rehab::testing
