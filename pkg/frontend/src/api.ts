/** Typed client for the layout API. The base URL is the only configuration. */

import {
  ApiErrorBody,
  ChatMessage,
  ComponentDescriptor,
  LayoutDocument,
  LoginResponse,
  UserDetails,
  canonicalizeInstances,
} from "./types.js";

export const SESSION_HEADER = "X-Flex-Session";
export const READ_ONLY_HEADER = "X-Layout-Read-Only";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details?: unknown,
  ) {
    super(message);
  }
}

async function raiseFor(response: Response): Promise<never> {
  let body: ApiErrorBody;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = { code: "internal_error", message: `HTTP ${response.status}` };
  }
  throw new ApiError(response.status, body.code, body.message, body.details);
}

export class ApiClient {
  token: string | null = null;

  constructor(readonly baseUrl: string = "") {}

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = {};
    if (this.token) {
      headers[SESSION_HEADER] = this.token;
    }
    if (json) {
      headers["Content-Type"] = "application/json";
    }
    return headers;
  }

  private async request(method: string, path: string, body?: string): Promise<Response> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: this.headers(body !== undefined),
      body,
    });
    if (!response.ok) {
      await raiseFor(response);
    }
    return response;
  }

  async login(username: string, password: string): Promise<LoginResponse> {
    const response = await this.request("POST", "/api/login", JSON.stringify({ username, password }));
    const data = (await response.json()) as LoginResponse;
    this.token = data.token;
    return data;
  }

  async logout(): Promise<void> {
    await this.request("POST", "/api/logout");
    this.token = null;
  }

  async getLayout(): Promise<{ document: LayoutDocument; readOnly: boolean }> {
    const response = await this.request("GET", "/api/layout");
    const document = (await response.json()) as LayoutDocument;
    return { document, readOnly: response.headers.get(READ_ONLY_HEADER) === "true" };
  }

  async putLayout(document: LayoutDocument): Promise<number> {
    const canonical = canonicalizeInstances(document);
    const response = await this.request("PUT", "/api/layout", JSON.stringify(canonical));
    const data = (await response.json()) as { revision: number };
    return data.revision;
  }

  async deleteLayout(): Promise<void> {
    await this.request("DELETE", "/api/layout");
  }

  async getComponents(): Promise<ComponentDescriptor[]> {
    const response = await this.request("GET", "/api/components");
    return (await response.json()) as ComponentDescriptor[];
  }

  async getUserDetails(): Promise<UserDetails> {
    const response = await this.request("GET", "/api/user/details");
    return (await response.json()) as UserDetails;
  }

  async putUserDetails(details: Record<string, string>): Promise<UserDetails> {
    const response = await this.request("PUT", "/api/user/details", JSON.stringify(details));
    return (await response.json()) as UserDetails;
  }

  async getChat(sinceSeq: number, limit = 100): Promise<ChatMessage[]> {
    const response = await this.request("GET", `/api/chat?since_seq=${sinceSeq}&limit=${limit}`);
    return (await response.json()) as ChatMessage[];
  }

  async postChat(body: string): Promise<number> {
    const response = await this.request("POST", "/api/chat", JSON.stringify({ body }));
    const data = (await response.json()) as { seq: number };
    return data.seq;
  }

  async getProducts(): Promise<Array<Record<string, string>>> {
    const response = await this.request("GET", "/api/pdm/products");
    return (await response.json()) as Array<Record<string, string>>;
  }

  async getProjects(): Promise<Array<Record<string, string>>> {
    const response = await this.request("GET", "/api/pdm/projects");
    return (await response.json()) as Array<Record<string, string>>;
  }
}
