// Audio demux/decode/resample against the system FFmpeg libraries, plus a
// small muxer for synthesizing audio+video sample clips.

#include <pybind11/pybind11.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

extern "C" {
#include <libavcodec/avcodec.h>
#include <libavformat/avformat.h>
#include <libavutil/channel_layout.h>
#include <libavutil/opt.h>
#include <libswresample/swresample.h>
}

namespace py = pybind11;

// FFmpeg 5.1 replaced the uint64 channel masks with AVChannelLayout.
#if LIBAVUTIL_VERSION_INT >= AV_VERSION_INT(57, 28, 100)
#define HAVE_CH_LAYOUT 1
#else
#define HAVE_CH_LAYOUT 0
#endif

namespace {

std::string averr(int code) {
    char buf[AV_ERROR_MAX_STRING_SIZE] = {0};
    av_strerror(code, buf, sizeof(buf));
    return std::string(buf);
}

[[noreturn]] void fail(const std::string& what, int code) {
    throw std::runtime_error(what + ": " + averr(code));
}

struct FormatGuard {
    AVFormatContext* ctx = nullptr;
    ~FormatGuard() {
        if (ctx) avformat_close_input(&ctx);
    }
};

struct CodecGuard {
    AVCodecContext* ctx = nullptr;
    ~CodecGuard() {
        if (ctx) avcodec_free_context(&ctx);
    }
};

struct SwrGuard {
    SwrContext* ctx = nullptr;
    ~SwrGuard() {
        if (ctx) swr_free(&ctx);
    }
};

struct FrameGuard {
    AVFrame* frame = nullptr;
    FrameGuard() : frame(av_frame_alloc()) {}
    ~FrameGuard() {
        if (frame) av_frame_free(&frame);
    }
};

struct PacketGuard {
    AVPacket* pkt = nullptr;
    PacketGuard() : pkt(av_packet_alloc()) {}
    ~PacketGuard() {
        if (pkt) av_packet_free(&pkt);
    }
};

AVFormatContext* open_input(const std::string& path) {
    AVFormatContext* ctx = nullptr;
    int rc = avformat_open_input(&ctx, path.c_str(), nullptr, nullptr);
    if (rc < 0) fail("cannot open " + path, rc);
    rc = avformat_find_stream_info(ctx, nullptr);
    if (rc < 0) {
        avformat_close_input(&ctx);
        fail("cannot probe streams in " + path, rc);
    }
    return ctx;
}

}  // namespace

// (has_video, has_audio) for a decodable container.
static py::tuple probe_streams(const std::string& path) {
    FormatGuard fmt;
    fmt.ctx = open_input(path);
    bool has_video = false, has_audio = false;
    for (unsigned i = 0; i < fmt.ctx->nb_streams; ++i) {
        AVMediaType type = fmt.ctx->streams[i]->codecpar->codec_type;
        if (type == AVMEDIA_TYPE_VIDEO) has_video = true;
        if (type == AVMEDIA_TYPE_AUDIO) has_audio = true;
    }
    return py::make_tuple(has_video, has_audio);
}

// Decode the best audio stream to mono float32 at target_rate.
// Returns bytes, or None when the container has no audio stream.
static py::object decode_audio(const std::string& path, int target_rate) {
    FormatGuard fmt;
    fmt.ctx = open_input(path);

#if LIBAVCODEC_VERSION_INT >= AV_VERSION_INT(59, 0, 100)
    const AVCodec* codec = nullptr;
#else
    AVCodec* codec = nullptr;
#endif
    int stream_index =
        av_find_best_stream(fmt.ctx, AVMEDIA_TYPE_AUDIO, -1, -1, &codec, 0);
    if (stream_index == AVERROR_STREAM_NOT_FOUND) return py::none();
    if (stream_index < 0) fail("no usable audio stream in " + path, stream_index);

    CodecGuard dec;
    dec.ctx = avcodec_alloc_context3(codec);
    if (!dec.ctx) throw std::runtime_error("cannot allocate audio decoder");
    int rc = avcodec_parameters_to_context(
        dec.ctx, fmt.ctx->streams[stream_index]->codecpar);
    if (rc < 0) fail("bad audio stream parameters", rc);
    rc = avcodec_open2(dec.ctx, codec, nullptr);
    if (rc < 0) fail("cannot open audio decoder", rc);

    SwrGuard swr;
#if HAVE_CH_LAYOUT
    AVChannelLayout mono = AV_CHANNEL_LAYOUT_MONO;
    AVChannelLayout in_layout;
    if (dec.ctx->ch_layout.nb_channels > 0) {
        av_channel_layout_copy(&in_layout, &dec.ctx->ch_layout);
    } else {
        av_channel_layout_default(&in_layout, 1);
    }
    rc = swr_alloc_set_opts2(&swr.ctx, &mono, AV_SAMPLE_FMT_FLT, target_rate,
                             &in_layout, dec.ctx->sample_fmt,
                             dec.ctx->sample_rate, 0, nullptr);
    if (rc < 0) fail("cannot configure resampler", rc);
#else
    int64_t in_layout = dec.ctx->channel_layout
                            ? (int64_t)dec.ctx->channel_layout
                            : av_get_default_channel_layout(dec.ctx->channels);
    swr.ctx = swr_alloc_set_opts(nullptr, AV_CH_LAYOUT_MONO, AV_SAMPLE_FMT_FLT,
                                 target_rate, in_layout, dec.ctx->sample_fmt,
                                 dec.ctx->sample_rate, 0, nullptr);
    if (!swr.ctx) throw std::runtime_error("cannot configure resampler");
#endif
    rc = swr_init(swr.ctx);
    if (rc < 0) fail("cannot initialize resampler", rc);

    std::vector<float> samples;
    PacketGuard pkt;
    FrameGuard frame;
    std::vector<float> chunk;

    auto convert = [&](const AVFrame* in) {
        int64_t delay = swr_get_delay(swr.ctx, dec.ctx->sample_rate);
        int64_t in_count = in ? in->nb_samples : 0;
        int out_cap = (int)av_rescale_rnd(delay + in_count, target_rate,
                                          dec.ctx->sample_rate, AV_ROUND_UP);
        if (out_cap <= 0) out_cap = 256;
        chunk.resize((size_t)out_cap);
        uint8_t* out_planes[1] = {reinterpret_cast<uint8_t*>(chunk.data())};
        int got = swr_convert(swr.ctx, out_planes, out_cap,
                              in ? const_cast<const uint8_t**>(
                                       (const uint8_t**)in->extended_data)
                                 : nullptr,
                              (int)in_count);
        if (got < 0) fail("resampling failed", got);
        samples.insert(samples.end(), chunk.begin(), chunk.begin() + got);
    };

    auto drain_decoder = [&]() {
        while (true) {
            int r = avcodec_receive_frame(dec.ctx, frame.frame);
            if (r == AVERROR(EAGAIN) || r == AVERROR_EOF) break;
            if (r < 0) fail("audio decode failed", r);
            convert(frame.frame);
            av_frame_unref(frame.frame);
        }
    };

    while ((rc = av_read_frame(fmt.ctx, pkt.pkt)) >= 0) {
        if (pkt.pkt->stream_index == stream_index) {
            rc = avcodec_send_packet(dec.ctx, pkt.pkt);
            if (rc < 0 && rc != AVERROR(EAGAIN)) fail("audio decode failed", rc);
            drain_decoder();
        }
        av_packet_unref(pkt.pkt);
    }
    if (rc != AVERROR_EOF) fail("reading " + path + " failed", rc);
    avcodec_send_packet(dec.ctx, nullptr);
    drain_decoder();
    convert(nullptr);  // flush the resampler

    return py::bytes(reinterpret_cast<const char*>(samples.data()),
                     samples.size() * sizeof(float));
}

namespace {

void write_encoded(AVFormatContext* oc, AVCodecContext* ctx, AVStream* st,
                   const AVFrame* frame) {
    int rc = avcodec_send_frame(ctx, frame);
    if (rc < 0) fail("encoding failed", rc);
    PacketGuard pkt;
    while (true) {
        rc = avcodec_receive_packet(ctx, pkt.pkt);
        if (rc == AVERROR(EAGAIN) || rc == AVERROR_EOF) break;
        if (rc < 0) fail("encoding failed", rc);
        av_packet_rescale_ts(pkt.pkt, ctx->time_base, st->time_base);
        pkt.pkt->stream_index = st->index;
        rc = av_interleaved_write_frame(oc, pkt.pkt);
        if (rc < 0) fail("writing packet failed", rc);
    }
}

}  // namespace

// Synthesize a short clip: moving-gradient MPEG-4 video plus (optionally) a
// stereo AAC sine tone. Used to manufacture full-AV / video-only fixtures.
static void write_sample_clip(const std::string& path, double duration,
                              int fps, int width, int height, int sample_rate,
                              double tone_hz, bool with_audio) {
    AVFormatContext* raw_oc = nullptr;
    int rc = avformat_alloc_output_context2(&raw_oc, nullptr, nullptr,
                                            path.c_str());
    if (rc < 0 || !raw_oc) fail("cannot create container for " + path, rc);
    struct OutGuard {
        AVFormatContext* ctx;
        ~OutGuard() {
            if (!ctx) return;
            if (ctx->pb && !(ctx->oformat->flags & AVFMT_NOFILE))
                avio_closep(&ctx->pb);
            avformat_free_context(ctx);
        }
    } oc{raw_oc};

#if LIBAVCODEC_VERSION_INT >= AV_VERSION_INT(59, 0, 100)
    const AVCodec* vcodec = avcodec_find_encoder(AV_CODEC_ID_MPEG4);
    const AVCodec* acodec = avcodec_find_encoder(AV_CODEC_ID_AAC);
#else
    AVCodec* vcodec = avcodec_find_encoder(AV_CODEC_ID_MPEG4);
    AVCodec* acodec = avcodec_find_encoder(AV_CODEC_ID_AAC);
#endif
    if (!vcodec || !acodec)
        throw std::runtime_error("mpeg4/aac encoders unavailable");

    AVStream* vst = avformat_new_stream(oc.ctx, nullptr);
    CodecGuard venc;
    venc.ctx = avcodec_alloc_context3(vcodec);
    venc.ctx->width = width;
    venc.ctx->height = height;
    venc.ctx->pix_fmt = AV_PIX_FMT_YUV420P;
    venc.ctx->time_base = AVRational{1, fps};
    venc.ctx->bit_rate = 400000;
    venc.ctx->gop_size = 12;
    if (oc.ctx->oformat->flags & AVFMT_GLOBALHEADER)
        venc.ctx->flags |= AV_CODEC_FLAG_GLOBAL_HEADER;
    rc = avcodec_open2(venc.ctx, vcodec, nullptr);
    if (rc < 0) fail("cannot open mpeg4 encoder", rc);
    avcodec_parameters_from_context(vst->codecpar, venc.ctx);
    vst->time_base = venc.ctx->time_base;

    AVStream* ast = nullptr;
    CodecGuard aenc;
    if (with_audio) {
        ast = avformat_new_stream(oc.ctx, nullptr);
        aenc.ctx = avcodec_alloc_context3(acodec);
        aenc.ctx->sample_rate = sample_rate;
        aenc.ctx->sample_fmt = AV_SAMPLE_FMT_FLTP;
        aenc.ctx->bit_rate = 96000;
        aenc.ctx->time_base = AVRational{1, sample_rate};
#if HAVE_CH_LAYOUT
        AVChannelLayout stereo = AV_CHANNEL_LAYOUT_STEREO;
        av_channel_layout_copy(&aenc.ctx->ch_layout, &stereo);
#else
        aenc.ctx->channel_layout = AV_CH_LAYOUT_STEREO;
        aenc.ctx->channels = 2;
#endif
        if (oc.ctx->oformat->flags & AVFMT_GLOBALHEADER)
            aenc.ctx->flags |= AV_CODEC_FLAG_GLOBAL_HEADER;
        rc = avcodec_open2(aenc.ctx, acodec, nullptr);
        if (rc < 0) fail("cannot open aac encoder", rc);
        avcodec_parameters_from_context(ast->codecpar, aenc.ctx);
        ast->time_base = aenc.ctx->time_base;
    }

    if (!(oc.ctx->oformat->flags & AVFMT_NOFILE)) {
        rc = avio_open(&oc.ctx->pb, path.c_str(), AVIO_FLAG_WRITE);
        if (rc < 0) fail("cannot open " + path + " for writing", rc);
    }
    rc = avformat_write_header(oc.ctx, nullptr);
    if (rc < 0) fail("cannot write container header", rc);

    // video: a gradient that drifts frame to frame
    int n_frames = (int)std::lround(duration * fps);
    if (n_frames < 1) n_frames = 1;
    FrameGuard vframe;
    vframe.frame->format = AV_PIX_FMT_YUV420P;
    vframe.frame->width = width;
    vframe.frame->height = height;
    rc = av_frame_get_buffer(vframe.frame, 0);
    if (rc < 0) fail("cannot allocate video frame", rc);
    for (int i = 0; i < n_frames; ++i) {
        rc = av_frame_make_writable(vframe.frame);
        if (rc < 0) fail("video frame not writable", rc);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                vframe.frame->data[0][y * vframe.frame->linesize[0] + x] =
                    (uint8_t)((x + y + i * 3) & 0xff);
        for (int y = 0; y < height / 2; ++y)
            for (int x = 0; x < width / 2; ++x) {
                vframe.frame->data[1][y * vframe.frame->linesize[1] + x] =
                    (uint8_t)((128 + y + i * 2) & 0xff);
                vframe.frame->data[2][y * vframe.frame->linesize[2] + x] =
                    (uint8_t)((64 + x + i * 5) & 0xff);
            }
        vframe.frame->pts = i;
        write_encoded(oc.ctx, venc.ctx, vst, vframe.frame);
    }
    write_encoded(oc.ctx, venc.ctx, vst, nullptr);

    if (with_audio) {
        int frame_size = aenc.ctx->frame_size > 0 ? aenc.ctx->frame_size : 1024;
        int total = (int)std::lround(duration * sample_rate);
        FrameGuard aframe;
        aframe.frame->format = AV_SAMPLE_FMT_FLTP;
        aframe.frame->nb_samples = frame_size;
#if HAVE_CH_LAYOUT
        AVChannelLayout stereo = AV_CHANNEL_LAYOUT_STEREO;
        av_channel_layout_copy(&aframe.frame->ch_layout, &stereo);
#else
        aframe.frame->channel_layout = AV_CH_LAYOUT_STEREO;
        aframe.frame->channels = 2;
#endif
        rc = av_frame_get_buffer(aframe.frame, 0);
        if (rc < 0) fail("cannot allocate audio frame", rc);
        int written = 0;
        while (written < total) {
            rc = av_frame_make_writable(aframe.frame);
            if (rc < 0) fail("audio frame not writable", rc);
            float* left = reinterpret_cast<float*>(aframe.frame->data[0]);
            float* right = reinterpret_cast<float*>(aframe.frame->data[1]);
            for (int s = 0; s < frame_size; ++s) {
                double t = (double)(written + s) / sample_rate;
                float value = written + s < total
                                  ? (float)(0.4 * std::sin(2.0 * M_PI * tone_hz * t))
                                  : 0.0f;
                left[s] = value;
                right[s] = value * 0.8f;
            }
            aframe.frame->pts = written;
            write_encoded(oc.ctx, aenc.ctx, ast, aframe.frame);
            written += frame_size;
        }
        write_encoded(oc.ctx, aenc.ctx, ast, nullptr);
    }

    rc = av_write_trailer(oc.ctx);
    if (rc < 0) fail("cannot finalize " + path, rc);
}

PYBIND11_MODULE(_libav, m) {
    m.doc() = "Thin FFmpeg bindings: audio decoding and sample-clip synthesis";
    av_log_set_level(AV_LOG_ERROR);
    m.def("probe_streams", &probe_streams, py::arg("path"),
          "Return (has_video, has_audio) for a decodable container");
    m.def("decode_audio", &decode_audio, py::arg("path"),
          py::arg("target_rate") = 16000,
          "Decode the audio track to mono float32 bytes at target_rate; "
          "None when the container has no audio stream");
    m.def("write_sample_clip", &write_sample_clip, py::arg("path"),
          py::arg("duration") = 1.0, py::arg("fps") = 30,
          py::arg("width") = 320, py::arg("height") = 240,
          py::arg("sample_rate") = 48000, py::arg("tone_hz") = 440.0,
          py::arg("with_audio") = true,
          "Write a small MPEG-4 + AAC clip for fixtures and smoke tests");
}
