#pragma once

#include <iosfwd>
#include <string>

#include "polymine/logic/signature.hpp"

namespace polymine::logic {

// Declarative structure documents:
//   {
//     "sorts":   [{"name": "USERS", "carrier": ["alice","bob"]},
//                 {"name": "DIST", "int_range": [0, 10]}],
//     "symbols": [{"name": "UA", "kind": "relation",
//                  "args": ["USERS","ROLES"], "rigid": false},
//                 {"name": "Loc", "kind": "function",
//                  "args": ["USERS"], "result": "POINTS", "rigid": true}],
//     "rigid":   {"UAtt": [["alice","a1"]],        // relation tuples
//                 "Loc":  [["alice","p1"]]}        // function graph rows
//   }
// BOOL, USERS and PERMS exist implicitly; USERS/PERMS carriers may be
// (re)declared here.
Structure structure_from_json(const std::string& text);
Structure structure_from_json_file(const std::string& path);
std::string structure_to_json(const Structure& s);

}  // namespace polymine::logic
