// Typed client over the gateway's /v1 surface. Errors carry the gateway's
// stable machine codes verbatim.

import { isApiError } from './types.js'
import type {
  ApiError,
  ArtifactEnvelope,
  CapabilityInfo,
  Manifest,
  RunRecord,
  SkillInfo,
} from './types.js'

export class GatewayError extends Error {
  constructor(readonly api: ApiError, readonly status: number) {
    super(`${api.code}: ${api.message}`)
  }
}

export class GatewayUnreachable extends Error {
  constructor(readonly cause_: unknown) {
    super('gateway unreachable')
  }
}

export class GatewayClient {
  constructor(
    readonly baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response
    try {
      response = await this.fetchImpl(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { 'content-type': 'application/json' },
        body: body === undefined ? undefined : JSON.stringify(body),
      })
    } catch (error) {
      throw new GatewayUnreachable(error)
    }
    const parsed = await response.json().catch(() => null)
    if (!response.ok) {
      if (isApiError(parsed)) throw new GatewayError(parsed, response.status)
      throw new GatewayError(
        { code: 'HTTP_' + response.status, message: String(parsed), details: {} },
        response.status,
      )
    }
    return parsed as T
  }

  health(): Promise<{ status: string; config_version: number }> {
    return this.request('GET', '/healthz')
  }

  async capabilities(): Promise<CapabilityInfo[]> {
    const body = await this.request<{ capabilities: CapabilityInfo[] }>(
      'GET',
      '/v1/capabilities',
    )
    return body.capabilities
  }

  async skills(): Promise<SkillInfo[]> {
    const body = await this.request<{ skills: SkillInfo[] }>('GET', '/v1/skills')
    return body.skills
  }

  invokeTool(
    toolName: string,
    params: Record<string, unknown>,
    provider?: string,
    model?: string,
  ): Promise<{ artifact_id: string; provider_used: string }> {
    return this.request('POST', `/v1/capabilities/${toolName}:invoke`, {
      params,
      ...(provider ? { provider } : {}),
      ...(model ? { model } : {}),
    })
  }

  async runSkill(name: string, params: Record<string, unknown>): Promise<string> {
    const body = await this.request<{ run_id: string }>(
      'POST',
      `/v1/skills/${name}:run`,
      { params },
    )
    return body.run_id
  }

  async runs(): Promise<RunRecord[]> {
    const body = await this.request<{ runs: RunRecord[] }>('GET', '/v1/runs')
    return body.runs
  }

  run(runId: string): Promise<RunRecord> {
    return this.request('GET', `/v1/runs/${runId}`)
  }

  artifact(artifactId: string): Promise<ArtifactEnvelope> {
    return this.request('GET', `/v1/artifacts/${artifactId}`)
  }

  artifactContent(artifactId: string): Promise<Manifest> {
    return this.request('GET', `/v1/artifacts/${artifactId}/content`)
  }

  routing(): Promise<Record<string, unknown>> {
    return this.request('GET', '/v1/routing')
  }

  putRouting(config: unknown): Promise<{ version: number }> {
    return this.request('PUT', '/v1/routing', config)
  }

  validateRouting(config: unknown): Promise<{ violations: { code: string; path: string; message: string }[] }> {
    return this.request('POST', '/v1/routing:validate', config)
  }
}
