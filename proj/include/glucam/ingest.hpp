#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "glucam/core.hpp"

namespace glucam {

/// Per-frame mean channel intensities of a fingertip video.
struct FrameStatsSeries {
    struct Frame {
        std::int64_t index = 0;
        double red = 0.0;
        double green = 0.0;
        double blue = 0.0;
    };

    std::vector<Frame> frames;
    double fps = 0.0;
    double channel_max = 255.0;

    void validate() const {
        if (!(fps > 0.0)) fail(ErrorKind::range, "fps must be > 0");
        if (!(channel_max > 0.0)) fail(ErrorKind::range, "channel_max must be > 0");
        for (std::size_t i = 0; i < frames.size(); ++i) {
            const Frame& f = frames[i];
            for (double v : {f.red, f.green, f.blue}) {
                if (!std::isfinite(v) || v < 0.0 || v > channel_max)
                    fail(ErrorKind::range,
                         "channel mean out of [0, channel_max] at frame index " +
                             std::to_string(f.index));
            }
            if (i > 0 && frames[i - 1].index >= f.index)
                fail(ErrorKind::order, "frame_index not strictly increasing at row " +
                                           std::to_string(i + 1));
        }
    }
};

enum class Channel { red, green, blue };

inline const char* channel_name(Channel c) {
    switch (c) {
        case Channel::red: return "red";
        case Channel::green: return "green";
        case Channel::blue: return "blue";
    }
    return "red";
}

inline Channel channel_from_name(const std::string& name) {
    if (name == "red") return Channel::red;
    if (name == "green") return Channel::green;
    if (name == "blue") return Channel::blue;
    fail(ErrorKind::config, "unknown channel: " + name);
}

/// Green and blue carry little pulsatile signal on fingertip video;
/// outputs extracted from them are flagged in artifact metadata.
inline bool channel_is_noisy(Channel c) { return c != Channel::red; }

namespace detail {

inline double parse_double_field(const std::string& field, std::size_t line_no,
                                 const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(field, &pos);
        while (pos < field.size() && (field[pos] == ' ' || field[pos] == '\t' ||
                                      field[pos] == '\r'))
            ++pos;
        if (pos != field.size())
            fail(ErrorKind::parse, std::string("trailing characters in ") + what +
                                       " at line " + std::to_string(line_no));
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        fail(ErrorKind::parse, std::string("cannot parse ") + what + " at line " +
                                   std::to_string(line_no));
    }
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

/// Parses "#key=value,key=value" comment headers.
inline void parse_kv_header(const std::string& line, std::size_t line_no,
                            std::vector<std::pair<std::string, std::string>>& kv) {
    for (const std::string& item : split_csv_row(line.substr(1))) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::parse, "malformed header entry at line " + std::to_string(line_no));
        kv.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
}

}  // namespace detail

/// Reads the frame-stats CSV: a `#fps=<float>,channel_max=<float>` header
/// line followed by `frame_index,mean_red,mean_green,mean_blue` rows.
inline FrameStatsSeries parse_frame_stats(std::istream& in) {
    FrameStatsSeries series;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') {
            std::vector<std::pair<std::string, std::string>> kv;
            detail::parse_kv_header(line, line_no, kv);
            for (const auto& [key, value] : kv) {
                if (key == "fps") {
                    series.fps = detail::parse_double_field(value, line_no, "fps");
                    have_header = true;
                } else if (key == "channel_max") {
                    series.channel_max = detail::parse_double_field(value, line_no, "channel_max");
                }
            }
            continue;
        }
        const std::vector<std::string> fields = detail::split_csv_row(line);
        if (fields.size() != 4)
            fail(ErrorKind::parse, "expected 4 fields at line " + std::to_string(line_no) +
                                       ", got " + std::to_string(fields.size()));
        FrameStatsSeries::Frame f;
        const double idx = detail::parse_double_field(fields[0], line_no, "frame_index");
        if (idx != std::floor(idx))
            fail(ErrorKind::parse, "frame_index not an integer at line " + std::to_string(line_no));
        f.index = static_cast<std::int64_t>(idx);
        f.red = detail::parse_double_field(fields[1], line_no, "mean_red");
        f.green = detail::parse_double_field(fields[2], line_no, "mean_green");
        f.blue = detail::parse_double_field(fields[3], line_no, "mean_blue");
        if (!series.frames.empty() && series.frames.back().index >= f.index)
            fail(ErrorKind::order, "frame_index not strictly increasing at line " +
                                       std::to_string(line_no));
        series.frames.push_back(f);
    }
    if (!have_header) fail(ErrorKind::parse, "missing #fps= header line");
    series.validate();
    return series;
}

/// Whole-frame arithmetic mean of one channel. No region of interest is
/// taken; every pixel participates.
inline double frame_mean(const std::vector<std::vector<double>>& grid) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& row : grid) {
        for (double v : row) {
            sum += v;
            ++count;
        }
    }
    if (count == 0) fail(ErrorKind::domain, "frame_mean of empty pixel grid");
    return sum / static_cast<double>(count);
}

/// Reads a plain-text PGM (P2) single-channel frame into a pixel grid.
inline std::vector<std::vector<double>> parse_pgm_grid(std::istream& in) {
    std::string magic;
    in >> magic;
    if (magic != "P2") fail(ErrorKind::parse, "expected P2 grid header");
    std::size_t width = 0, height = 0;
    double maxval = 0.0;
    if (!(in >> width >> height >> maxval) || width == 0 || height == 0)
        fail(ErrorKind::parse, "malformed P2 dimensions");
    std::vector<std::vector<double>> grid(height, std::vector<double>(width));
    for (auto& row : grid) {
        for (double& v : row) {
            if (!(in >> v)) fail(ErrorKind::parse, "truncated P2 pixel data");
        }
    }
    return grid;
}

/// Converts a channel's per-frame means into a raw PPG waveform: the series
/// mean is subtracted and, when `flip` is set (default for red), the sign is
/// inverted so pulses point upward.
inline PpgSignal extract_ppg(const FrameStatsSeries& series, Channel channel = Channel::red,
                             std::optional<bool> flip = std::nullopt) {
    series.validate();
    if (series.frames.size() < 2)
        fail(ErrorKind::insufficient_data, "need at least 2 frames to extract a waveform");

    const bool do_flip = flip.value_or(channel == Channel::red);
    std::vector<double> values(series.frames.size());
    for (std::size_t i = 0; i < series.frames.size(); ++i) {
        const auto& f = series.frames[i];
        values[i] = channel == Channel::red ? f.red : channel == Channel::green ? f.green : f.blue;
    }
    const double dc = mean(values);
    const double sign = do_flip ? -1.0 : 1.0;

    PpgSignal signal;
    signal.samples.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) signal.samples[i] = sign * (values[i] - dc);
    signal.fs = series.fps;
    signal.stage = Stage::raw;
    return signal;
}

}  // namespace glucam
