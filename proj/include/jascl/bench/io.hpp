#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "jascl/bench/dataset.hpp"
#include "jascl/bench/protocol.hpp"
#include "jascl/common.hpp"

#include <json.hpp>

namespace jascl::bench {

inline constexpr const char* kManifestFormat = "jascl-bench/1";

/// Binary PGM (P5, maxval 255). Used for both grayscale images and indexed
/// label grids (class ids as gray values).
inline void write_pgm(const std::filesystem::path& path, const Grid<std::uint8_t>& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StateError("write_pgm: cannot open " + path.string());
  out << "P5\n" << grid.width << " " << grid.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(grid.data.data()),
            static_cast<std::streamsize>(grid.data.size()));
}

inline Grid<std::uint8_t> read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StateError("read_pgm: cannot open " + path.string());
  std::string magic;
  std::size_t w = 0, h = 0;
  int maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || maxval != 255) throw StateError("read_pgm: unsupported format");
  in.get();  // single whitespace after the header
  Grid<std::uint8_t> grid(h, w, 0);
  in.read(reinterpret_cast<char*>(grid.data.data()),
          static_cast<std::streamsize>(grid.data.size()));
  if (!in) throw StateError("read_pgm: truncated file");
  return grid;
}

inline Grid<std::uint8_t> labels_to_gray(const Grid<int>& labels) {
  Grid<std::uint8_t> out(labels.height, labels.width, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int v = labels.data[i];
    require(v >= 0 && v <= 255, "labels_to_gray: class id outside raster range");
    out.data[i] = static_cast<std::uint8_t>(v);
  }
  return out;
}

inline Grid<int> gray_to_labels(const Grid<std::uint8_t>& gray) {
  Grid<int> out(gray.height, gray.width, 0);
  for (std::size_t i = 0; i < gray.size(); ++i) out.data[i] = gray.data[i];
  return out;
}

inline nlohmann::json session_spec_json(const SessionSpec& s) {
  return {{"session", s.session_index},
          {"class_ids", s.class_ids},
          {"domain",
           {{"palette_rotation_deg", s.domain.palette_rotation_deg},
            {"noise_sigma", s.domain.noise_sigma},
            {"intensity_gamma", s.domain.intensity_gamma}}},
          {"labeled_count", s.labeled_count},
          {"unlabeled_count", s.unlabeled_count},
          {"shots", s.shots},
          {"test_count", s.test_count}};
}

/// Persist generated datasets as PGM rasters plus a manifest carrying the
/// protocol, the seed, and a content hash per file.
inline void write_dataset(const std::filesystem::path& dir, const ContinualProtocol& protocol,
                          const std::vector<SessionData>& data, std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  nlohmann::json manifest;
  manifest["format"] = kManifestFormat;
  manifest["seed"] = seed;
  nlohmann::json sessions = nlohmann::json::array();
  nlohmann::json files = nlohmann::json::array();

  auto dump_split = [&](const std::vector<LabeledImage>& split, const fs::path& sdir,
                        const std::string& split_name) {
    for (std::size_t i = 0; i < split.size(); ++i) {
      char stem[64];
      std::snprintf(stem, sizeof(stem), "%s_%04zu", split_name.c_str(), i);
      fs::path img_path = sdir / (std::string(stem) + ".pgm");
      fs::path lab_path = sdir / (std::string(stem) + "_labels.pgm");
      write_pgm(img_path, split[i].pixels);
      write_pgm(lab_path, labels_to_gray(split[i].labels));
      files.push_back({{"path", fs::relative(img_path, dir).generic_string()},
                       {"hash", fnv1a(split[i].pixels.data.data(), split[i].pixels.size())}});
      files.push_back({{"path", fs::relative(lab_path, dir).generic_string()},
                       {"hash", image_hash(split[i])}});
    }
  };

  for (std::size_t t = 0; t < data.size(); ++t) {
    fs::path sdir = dir / ("session" + std::to_string(t));
    fs::create_directories(sdir);
    sessions.push_back(session_spec_json(protocol.sessions[t]));
    if (t >= 1) {
      sessions.back()["transition"] = to_string(protocol.transitions[t - 1]);
    }
    dump_split(data[t].labeled, sdir, "labeled");
    dump_split(data[t].unlabeled, sdir, "unlabeled");
    dump_split(data[t].test, sdir, "test");
  }
  manifest["sessions"] = sessions;
  manifest["files"] = files;

  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
}

}  // namespace jascl::bench
