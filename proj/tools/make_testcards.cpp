// Writes the built-in test cards and an annotation manifest for them.

#include <fstream>
#include <iostream>
#include <string>

#include "spoofsynth/pipeline.hpp"
#include "spoofsynth/testcard.hpp"

int main(int argc, char** argv)
{
    namespace fs = std::filesystem;
    if (argc > 1 && argv[1][0] == '-') {
        std::cerr << "usage: make_testcards [DIR]\n";
        return argc == 2 && (std::string(argv[1]) == "-h" || std::string(argv[1]) == "--help") ? 0 : 2;
    }
    const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("testcards");
    fs::create_directories(dir);

    std::ofstream manifest(dir / "annotations.jsonl");
    for (const auto& card : spoofsynth::make_test_cards()) {
        spoofsynth::write_png(dir / (card.name + ".png"), card.image);
        spoofsynth::Json corners = spoofsynth::Json::array();
        for (const auto& c : card.corners) {
            corners.push_back({c.x, c.y});
        }
        for (const char* label : {"print", "replay", "live"}) {
            spoofsynth::Json j;
            j["id"] = card.name + "_" + label;
            j["image"] = card.name + ".png";
            j["corners"] = corners;
            j["eye_px_dist"] = card.eye_px_dist;
            j["label"] = label;
            manifest << j.dump() << '\n';
        }
    }
    std::cout << "wrote " << (dir / "annotations.jsonl").string() << '\n';
    return 0;
}
