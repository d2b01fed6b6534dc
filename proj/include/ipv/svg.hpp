#pragma once

// Minimal deterministic SVG writer. All coordinates go through one fixed
// printf format so identical inputs give byte-identical files.

#include <cstdio>
#include <string>
#include <vector>

namespace ipv::svg {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

class Writer {
  public:
    Writer(double min_x, double min_y, double width, double height, int pixel_width) {
        body_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                 std::to_string(pixel_width) + "\" viewBox=\"" + num(min_x) + " " + num(min_y) +
                 " " + num(width) + " " + num(height) + "\">\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill) {
        body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
                 "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& style) {
        body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
                 "\" " + style + "/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& style) {
        body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                 "\" y2=\"" + num(y2) + "\" " + style + "/>\n";
    }

    void path(const std::string& d, const std::string& style) {
        body_ += "<path d=\"" + d + "\" " + style + "/>\n";
    }

    void raw(const std::string& s) { body_ += s; }

    std::string finish() {
        body_ += "</svg>\n";
        return body_;
    }

  private:
    std::string body_;
};

// fixed palette; indices wrap
inline const char* palette(std::size_t i) {
    static const char* colors[] = {
        "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1",
        "#ff9da7", "#9c755f", "#bab0ac", "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
        "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79",
        "#637939", "#8c6d31", "#843c39", "#7b4173", "#5254a3", "#8ca252", "#bd9e39",
        "#ad494a", "#a55194", "#6b6ecf", "#b5cf6b"};
    return colors[i % 32];
}

}  // namespace ipv::svg
