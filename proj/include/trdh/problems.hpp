#pragma once

#include <trdh/problems/bpdn.hpp>
#include <trdh/problems/fh.hpp>
#include <trdh/problems/idx.hpp>
#include <trdh/problems/nnmf.hpp>
#include <trdh/problems/svm.hpp>
