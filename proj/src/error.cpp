#include "smch2/error.hpp"

namespace smch2 {

ConfigRejected::ConfigRejected(std::vector<std::string> messages)
    : Error([&] {
        std::string all = "config rejected";
        for (const auto& m : messages) all += "\n  " + m;
        return all;
      }()),
      messages_(std::move(messages)) {}

}  // namespace smch2
