#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::random_device rd;
        const auto base = std::filesystem::temp_directory_path();
        for (int attempt = 0; attempt < 100; ++attempt) {
            auto candidate =
                base / ("langdiv_test_" + std::to_string(rd()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path = std::move(candidate);
                return;
            }
        }
        throw std::runtime_error("cannot create temp directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name, const std::string& content) const {
        const auto p = path / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p.string();
    }
};
