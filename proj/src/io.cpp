#include "gpom/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gpom {

namespace {

// Skips whitespace and '#' comment lines in a PGM header.
int next_header_int(std::istream& in) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = 0;
  if (!(in >> value)) throw std::runtime_error("malformed PGM header");
  return value;
}

}  // namespace

PgmImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open PGM: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P2") throw std::runtime_error("unsupported PGM magic: " + magic);

  PgmImage img;
  img.width = next_header_int(in);
  img.height = next_header_int(in);
  const int maxval = next_header_int(in);
  if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 255)
    throw std::runtime_error("unsupported PGM dimensions in " + path);
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);

  if (magic == "P5") {
    in.get();  // single whitespace after maxval
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (!in) throw std::runtime_error("truncated PGM: " + path);
  } else {
    for (auto& px : img.pixels) {
      int v;
      if (!(in >> v)) throw std::runtime_error("truncated PGM: " + path);
      px = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

void write_pgm(const std::string& path, const PgmImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write PGM: " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
}

PgmImage probability_to_pgm(const GridSpec& grid, const std::vector<double>& prob) {
  PgmImage img;
  img.width = grid.width;
  img.height = grid.height;
  img.pixels.resize(prob.size());
  for (int cy = 0; cy < grid.height; ++cy) {
    const int row = grid.height - 1 - cy;  // row 0 on top
    for (int cx = 0; cx < grid.width; ++cx) {
      const double p = std::clamp(prob[grid.index({cx, cy})], 0.0, 1.0);
      img.pixels[row * grid.width + cx] = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - p)));
    }
  }
  return img;
}

void write_scaled_field_pgm(const std::string& path, const GridSpec& grid,
                            const std::vector<double>& field) {
  const auto [lo_it, hi_it] = std::minmax_element(field.begin(), field.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double span = hi > lo ? hi - lo : 1.0;

  PgmImage img;
  img.width = grid.width;
  img.height = grid.height;
  img.pixels.resize(field.size());
  for (int cy = 0; cy < grid.height; ++cy) {
    const int row = grid.height - 1 - cy;
    for (int cx = 0; cx < grid.width; ++cx) {
      const double v = (field[grid.index({cx, cy})] - lo) / span;
      img.pixels[row * grid.width + cx] = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
  }
  write_pgm(path, img);
  write_text_file(path + ".scale.txt",
                  "min=" + format_double(lo) + "\nmax=" + format_double(hi) + "\n");
}

PgmImage scaled_to_pgm(const GridSpec& grid, const std::vector<double>& field, double scale) {
  PgmImage img;
  img.width = grid.width;
  img.height = grid.height;
  img.pixels.resize(field.size());
  for (int cy = 0; cy < grid.height; ++cy) {
    const int row = grid.height - 1 - cy;
    for (int cx = 0; cx < grid.width; ++cx) {
      const double v = std::clamp(field[grid.index({cx, cy})] / scale, 0.0, 1.0);
      img.pixels[row * grid.width + cx] = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
  }
  return img;
}

std::string format_double(double v) {
  char buf[64];
  // Shortest representation that round-trips exactly.
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    double parsed = 0.0;
    std::sscanf(buf, "%lf", &parsed);
    if (parsed == v) break;
  }
  return buf;
}

void write_map_csv(const std::string& path, const GaussianMap& map) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write CSV: " + path);
  out << "x,y,mu,sigma,p\n";
  for (int cy = 0; cy < map.grid.height; ++cy) {
    for (int cx = 0; cx < map.grid.width; ++cx) {
      const int idx = map.grid.index({cx, cy});
      const Vec2 c = map.grid.cell_center({cx, cy});
      out << format_double(c.x) << ',' << format_double(c.y) << ',' << format_double(map.mean[idx])
          << ',' << format_double(map.variance[idx]) << ',' << format_double(map.prob[idx])
          << '\n';
    }
  }
}

MapCsv read_map_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "x,y,mu,sigma,p")
    throw std::runtime_error("unexpected map CSV header in " + path);

  std::vector<double> xs, ys, mu, var, p;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v[5];
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3], &v[4]) != 5)
      throw std::runtime_error("malformed map CSV row: " + line);
    xs.push_back(v[0]);
    ys.push_back(v[1]);
    mu.push_back(v[2]);
    var.push_back(v[3]);
    p.push_back(v[4]);
  }
  if (xs.empty()) throw std::runtime_error("empty map CSV: " + path);

  // Rows are written in cell order, x fastest; recover the grid from the
  // coordinates of the first row/column.
  int width = 1;
  while (width < static_cast<int>(xs.size()) && xs[width] > xs[width - 1]) ++width;
  if (static_cast<int>(xs.size()) % width != 0)
    throw std::runtime_error("map CSV is not a full grid: " + path);

  MapCsv out;
  out.grid.width = width;
  out.grid.height = static_cast<int>(xs.size()) / width;
  out.grid.resolution = width > 1 ? xs[1] - xs[0]
                                  : (out.grid.height > 1 ? ys[width] - ys[0] : 1.0);
  out.grid.origin = {xs[0] - 0.5 * out.grid.resolution, ys[0] - 0.5 * out.grid.resolution};
  out.mean = std::move(mu);
  out.variance = std::move(var);
  out.prob = std::move(p);
  return out;
}

void write_scan_log(const std::string& path, const std::vector<Scan>& scans) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scan log: " + path);
  out << "step,pose_x,pose_y,pose_h,bearing,range\n";
  for (std::size_t step = 0; step < scans.size(); ++step) {
    const Scan& scan = scans[step];
    for (const Beam& beam : scan.beams) {
      out << step << ',' << format_double(scan.pose.x) << ',' << format_double(scan.pose.y) << ','
          << format_double(scan.pose.heading) << ',' << format_double(beam.bearing) << ','
          << format_double(beam.range) << '\n';
    }
  }
}

std::vector<Scan> read_scan_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scan log: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "step,pose_x,pose_y,pose_h,bearing,range")
    throw std::runtime_error("unexpected scan log header in " + path);

  std::vector<Scan> scans;
  long last_step = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    long step;
    double px, py, ph, bearing, range;
    if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%lf,%lf", &step, &px, &py, &ph, &bearing,
                    &range) != 6)
      throw std::runtime_error("malformed scan log row: " + line);
    if (step != last_step) {
      if (step != last_step + 1)
        throw std::runtime_error("scan log steps must be contiguous: " + line);
      scans.push_back(Scan{{px, py, ph}, {}});
      last_step = step;
    }
    scans.back().beams.push_back({range, bearing});
  }
  return scans;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gpom
