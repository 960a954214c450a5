#include "cbrpsim/types.h"

#include <stdexcept>
#include <string>

namespace cbrpsim
{

std::string_view
ToString(Role role)
{
    switch (role)
    {
    case Role::Undecided:
        return "undecided";
    case Role::ClusterHead:
        return "head";
    case Role::Member:
        return "member";
    }
    return "?";
}

std::string_view
ToString(Protocol protocol)
{
    return protocol == Protocol::Cbrp ? "cbrp" : "cross-cbrp";
}

Protocol
ParseProtocol(std::string_view text)
{
    if (text == "cbrp")
    {
        return Protocol::Cbrp;
    }
    if (text == "cross-cbrp")
    {
        return Protocol::CrossCbrp;
    }
    throw std::invalid_argument("unknown protocol '" + std::string(text) + "'");
}

} // namespace cbrpsim
