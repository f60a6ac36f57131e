#ifndef TEPFORGE_CONFIG_HPP
#define TEPFORGE_CONFIG_HPP

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tepforge/sim.hpp"

namespace tepforge {

// Configuration rejection; message names the offending field path.
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// {"type":"awgn","sigma":...} | {"type":"mixture","components":[[omega,mu,sigma],...]}
// | {"type":"rayleigh_csi","sigma":...} | {"type":"rayleigh_ncsi","sigma":...,"mean_h":...}
ChannelModel parse_channel(const nlohmann::json& j, const std::string& path = "channel");

// Full experiment description for the `simulate` subcommand.
SimConfig parse_experiment(const nlohmann::json& j, const std::string& base_dir);

nlohmann::json load_json_file(const std::string& path);

}  // namespace tepforge

#endif
