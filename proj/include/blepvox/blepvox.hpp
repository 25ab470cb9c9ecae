#pragma once

#include "blepvox/analysis.hpp"
#include "blepvox/audio_buffer.hpp"
#include "blepvox/audio_io.hpp"
#include "blepvox/error.hpp"
#include "blepvox/fft.hpp"
#include "blepvox/losses.hpp"
#include "blepvox/oscillator.hpp"
#include "blepvox/synth.hpp"
#include "blepvox/window.hpp"
